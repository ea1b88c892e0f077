#pragma once

#include "robustexp/marginal_family.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace robustexp {

using SubsetPair = std::pair<FiniteSubset, FiniteSubset>;

struct ConsistencyRow {
    FiniteSubset j;
    FiniteSubset k;
    double max_discrepancy = 0.0;
    bool pass = true;
    /// Probe or separating function on S^K for failing rows.
    std::optional<std::vector<double>> witness;
    std::string note;
};

struct ConsistencyReport {
    std::vector<ConsistencyRow> rows;
    double tol = 1e-9;

    bool pass() const noexcept;
    const ConsistencyRow* first_failure() const noexcept;
    double max_discrepancy() const noexcept;
    /// Header "schema,J,K,max_discrepancy,pass"; every row starts with v1.
    std::string to_csv() const;
};

/// E_K(f) = E_J(f o pr_JK) on the indicator basis, its negation, and
/// `probes` uniform random functions per pair.
ConsistencyReport check_consistency_expectations(const MarginalFamily& family, const std::vector<SubsetPair>& pairs,
                                                 std::size_t probes, std::uint64_t seed = 0, double tol = 1e-9);

/**
 * Q_J o pr_JK^-1 = Q_K as convex hulls, by hull-membership LPs in both
 * directions. A pair stops at its first failing scenario, so for failing
 * rows max_discrepancy is the distance of that scenario.
 */
ConsistencyReport check_consistency_scenario_sets(const MarginalFamily& family, const std::vector<SubsetPair>& pairs,
                                                  double tol = 1e-9);

/// All pairs (J, K) with K a proper nonempty subset of J, J ranging over `sets`.
std::vector<SubsetPair> all_pairs(const std::vector<FiniteSubset>& sets);

/// E_J(f) for the cylinder function f o pr_J. With `check`, the entry's
/// consistency with its immediate subsets is verified once and cached;
/// a violation throws ConsistencyError naming the pair.
double cylinder_eval(const MarginalFamily& family, const CylinderFunction& g, bool check = true);

/// Image of a model on S^J under pr_JK.
ExpectationModel pushforward_marginal(const ExpectationModel& model, const FiniteSubset& j, const FiniteSubset& k);

struct ExtensionMarginal {
    PenaltyModel marginal;
    /// Always false: the path-space set with these marginals is not unique.
    bool path_set_unique = false;
    std::vector<FiniteSubset> verified_against;
};

/// Q_J after checking that it is the image of Q_J' for every superset
/// J' = J + {i} with i in the family's range (or up to max(J) + 1 when the
/// range is unbounded).
ExtensionMarginal extension_marginal(const MarginalFamily& family, const FiniteSubset& j, double tol = 1e-9);

} // namespace robustexp
