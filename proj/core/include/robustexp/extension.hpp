#pragma once

#include "robustexp/monotone_sequence.hpp"
#include "robustexp/subspace.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace robustexp {

using RVSequence = MonotoneSequence<RandomVariable>;

struct ExtensionCertificate {
    /// X0 = B c attaining the value (maximal and minimal extensions).
    std::vector<double> coefficients;
    /// Maximizing scenario of the minimal extension.
    std::optional<std::size_t> scenario;
    /// Limit-based extensions: number of terms evaluated and their values.
    std::size_t terms = 0;
    std::vector<double> partial_values;
};

struct ExtensionResult {
    double value = 0.0;
    ExtensionCertificate certificate;
    bool converged = false;
    /// LP: worst violation of the dominance constraint. Limits: last increment.
    double residual = 0.0;
};

inline constexpr double kDefaultLpTol = 1e-9;

/// inf { E(X0) : X0 in M, X0 >= x } as a linear program.
ExtensionResult maximal_extension_eval(const SubspaceModel& sub, const RandomVariable& x,
                                       double lp_tol = kDefaultLpTol);

/// sup { E(X0) : X0 in M, X0 <= x }, one LP per scenario.
ExtensionResult minimal_extension_eval(const SubspaceModel& sub, const RandomVariable& x,
                                       double lp_tol = kDefaultLpTol);

/// lim E(X_n) along a decreasing sequence inside M.
ExtensionResult delta_extension_eval(const SubspaceModel& sub, const RVSequence& seq, double tol,
                                     std::size_t max_terms);

/// Checks the first `terms` terms for pointwise monotonicity and for the
/// bound by the limit, if one is given.
bool is_monotone(const RVSequence& seq, std::size_t terms, double tol = 0.0);

} // namespace robustexp
