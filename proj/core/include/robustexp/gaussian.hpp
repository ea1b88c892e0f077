#pragma once

#include "robustexp/state_space.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace robustexp {

/// Drift and volatility bounds: mu_lo <= mu_hi, 0 < sigma_lo <= sigma_hi.
struct ParamBox {
    double mu_lo = 0.0;
    double mu_hi = 0.0;
    double sigma_lo = 1.0;
    double sigma_hi = 1.0;

    /// Throws DomainError unless finite and ordered as above.
    void validate() const;
    bool contains(double mu, double sigma) const noexcept;
};

/// Observation times 0 <= t_1 < ... < t_n <= T with 1 <= n <= 4; t_0 = 0.
class TimeGrid {
  public:
    TimeGrid(std::vector<double> times, double horizon);

    const std::vector<double>& times() const noexcept { return times_; }
    double horizon() const noexcept { return horizon_; }
    std::size_t size() const noexcept { return times_.size(); }
    /// t_k - t_{k-1}.
    std::vector<double> increments() const;

  private:
    std::vector<double> times_;
    double horizon_;
};

struct Monomial {
    double coef = 0.0;
    std::vector<unsigned> powers;
};

class Polynomial {
  public:
    Polynomial(std::size_t arity, std::vector<Monomial> terms);

    std::size_t arity() const noexcept { return arity_; }
    const std::vector<Monomial>& terms() const noexcept { return terms_; }
    /// Largest power of a single variable.
    unsigned max_power() const noexcept;
    double operator()(std::span<const double> x) const;

  private:
    std::size_t arity_;
    std::vector<Monomial> terms_;
};

/// A function on R^n given as an evaluator, optionally tagged as a polynomial.
class PathFunction {
  public:
    using Fn = std::function<double(std::span<const double>)>;

    PathFunction(std::string name, std::size_t arity, Fn fn);
    static PathFunction polynomial(Polynomial p, std::string name = "polynomial");

    const std::string& name() const noexcept { return name_; }
    std::size_t arity() const noexcept { return arity_; }
    const std::optional<Polynomial>& poly() const noexcept { return poly_; }
    double operator()(std::span<const double> x) const { return fn_(x); }

  private:
    std::string name_;
    std::size_t arity_;
    Fn fn_;
    std::optional<Polynomial> poly_;
};

/// Registry: one, first, last, last_sq, cos_last, sum, max, positive_last.
PathFunction named_function(const std::string& name, std::size_t arity);
const std::vector<std::string>& function_names();

/// f o pr_JK: f on the times `k` read as a function on the times `j`.
PathFunction extend_to(const PathFunction& f, const std::vector<double>& j, const std::vector<double>& k);

/**
 * E f(x_1, x_1 + x_2, ...) with independent increments
 * x_k ~ N(mu_k dt_k, sigma_k^2 dt_k), by tensor-product Gauss-Hermite
 * quadrature with `order` nodes per axis. A zero-variance increment uses a
 * single node at its mean. Throws DomainError on non-finite f values.
 */
double linear_eval(const TimeGrid& grid, const PathFunction& f, std::span<const double> mu,
                   std::span<const double> sigma, std::size_t order);

struct RobustOptions {
    std::size_t order = 20;
    std::size_t grid_per_axis = 9;
    bool refine = true;
};

/// Limit on grid points times quadrature nodes for one robust_eval.
inline constexpr double kGaussianCap = 2e9;

struct RobustResult {
    double value = 0.0;
    std::vector<double> mu;
    std::vector<double> sigma;
    /// Best value on the parameter grid.
    double grid_value = 0.0;
    /// |value at order - value at 2 * order| at the maximizer.
    double quadrature_error = 0.0;
    /// Gain of coordinate ascent over the grid maximum (computed even when
    /// refinement is off).
    double grid_error = 0.0;
    std::size_t evaluations = 0;

    double est_error() const noexcept { return quadrature_error + grid_error; }
};

/**
 * sup over mu in [mu_lo, mu_hi]^n and sigma in [sigma_lo, sigma_hi]^n of
 * linear_eval, by exhaustive grid search (ties go to the lexicographically
 * smallest (mu, sigma)) and, with `refine`, golden-section coordinate ascent
 * from the best grid point. Throws ArgumentError when grid_per_axis < 2 or
 * the work exceeds kGaussianCap.
 */
RobustResult robust_eval(const TimeGrid& grid, const PathFunction& f, const ParamBox& box,
                         const RobustOptions& options = {});

/// The family J -> E_J over finite time sets in [0, T].
class GaussianFamily {
  public:
    GaussianFamily(ParamBox box, double horizon, RobustOptions options);

    const ParamBox& box() const noexcept { return box_; }
    double horizon() const noexcept { return horizon_; }
    const RobustOptions& options() const noexcept { return options_; }
    RobustResult evaluate(const std::vector<double>& times, const PathFunction& f) const;

  private:
    ParamBox box_;
    double horizon_;
    RobustOptions options_;
};

GaussianFamily gaussian_marginal_family(const ParamBox& box, double horizon, std::size_t order,
                                        std::size_t grid_per_axis, bool refine = true);

struct GaussianConsistency {
    std::vector<double> j;
    std::vector<double> k;
    double value_k = 0.0;
    double value_j = 0.0;
    double discrepancy = 0.0;
    double quadrature_error = 0.0;
    double grid_error = 0.0;
    bool pass = true;
};

/// |E_K(f) - E_J(f o pr_JK)| for K a subset of J and f on R^K.
GaussianConsistency check_gaussian_consistency(const GaussianFamily& family, const std::vector<double>& j,
                                               const std::vector<double>& k, const PathFunction& f,
                                               double tol = 1e-4);

/**
 * Quadrature scenarios of X_t on a uniform grid of `points` states over
 * [lo, hi]: one scenario per (mu, sigma) grid point, nodes snapped to the
 * nearest state. Nodes beyond the ends land on the end states.
 */
std::vector<Scenario> gaussian_grid_scenarios(const ParamBox& box, double t, std::size_t order,
                                              std::size_t grid_per_axis, double lo, double hi, std::size_t points);

} // namespace robustexp
