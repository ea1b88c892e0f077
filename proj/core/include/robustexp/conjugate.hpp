#pragma once

#include "robustexp/expectation.hpp"

#include <optional>
#include <span>
#include <vector>

namespace robustexp {

struct ConjugateResult {
    /// sup of mu.X - E(X) over ||X||_inf <= radius; a lower bound of E*(mu).
    double estimate = 0.0;
    /// Exact E*(mu) for penalty-dual models (+inf outside the effective domain).
    std::optional<double> exact;
    std::vector<double> maximizer;
    double radius = 0.0;
};

/**
 * Convex conjugate E*(mu) = sup_X (mu.X - E(X)).
 *
 * The ball estimate is an LP for penalty-dual models. For entropic and
 * oracle models it is multi-start projected ascent (gradient for entropic,
 * golden-section coordinate search for oracle) started from every point of
 * {-R, 0, R}^n when n <= 6, otherwise from the origin and the 2n points
 * +-R e_i.
 */
ConjugateResult conjugate(const ExpectationModel& model, const Scenario& mu, double radius);

/// min sum_k lambda_k alpha_k over lambda in the simplex with sum lambda_k mu_k = mu.
double conjugate_exact(const PenaltyModel& pm, const Scenario& mu);

struct MembershipResult {
    bool member = false;
    /// L1 distance from mu to the convex hull of the scenarios.
    double distance = 0.0;
    /// For non-members: f with |f| <= 1 and mu.f - max_k mu_k.f = distance.
    std::optional<RandomVariable> witness;
};

/// Throws PreconditionError unless every penalty is zero.
MembershipResult scenario_membership(const PenaltyModel& pm, const Scenario& mu, double tol = 1e-9);

/// L1 distance from `point` to conv(generators), as the optimal gap of the
/// separator LP solved by cutting planes. The value is evaluated from the
/// separating function, so it never exceeds the true distance.
double hull_distance(const std::vector<std::span<const double>>& generators, std::span<const double> point);

/// f with |f| <= 1 maximizing point.f - max_g g.f; that gap is returned through `gap`.
std::vector<double> hull_separator(const std::vector<std::span<const double>>& generators,
                                   std::span<const double> point, double* gap = nullptr);

} // namespace robustexp
