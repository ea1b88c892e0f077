#pragma once

#include "robustexp/consistency.hpp"
#include "robustexp/extension.hpp"

#include <cstddef>
#include <vector>

namespace robustexp {

using CylinderSequence = MonotoneSequence<CylinderFunction>;

/**
 * lim E(g_n) for an increasing sequence of cylinder functions, the value
 * of the extension that is continuous from below. Stops once an increment
 * is below tol or after max_terms terms. Throws PreconditionError if two
 * consecutive terms are not ordered.
 */
ExtensionResult bar_extension_eval(const MarginalFamily& family, const CylinderSequence& seq, double tol,
                                   std::size_t max_terms);

/// g = 1 - 1{x_0..x_{n-1} = y} over J = {0, ..., n-1}, n = y.size().
CylinderFunction gap_function(const StateSpace& base, const std::vector<std::size_t>& y);

/// g_n = gap_function of the first n + 1 entries of y (list-backed, increasing).
CylinderSequence gap_sequence(const StateSpace& base, const std::vector<std::size_t>& y);

struct GapDemoResult {
    double hat_value = 0.0;
    double bar_limit = 0.0;
    std::vector<double> hat_by_depth;
    std::vector<double> bar_terms;
    /// Maximal-extension LP on S^{n+1} for the depths where it was solved.
    std::vector<double> lp_hat_by_depth;
    std::vector<std::size_t> y;
};

/**
 * The Dirac-at-y family on S = {0,1}: f = 1 - 1{x = y} is the increasing
 * limit of g_n. Any cylinder function over J dominating f equals 1 at every
 * path, because each fiber of pr_J contains a path other than y; the
 * smallest dominating cylinder function is therefore 1 and the maximal
 * extension of f is E_J(1) = 1 at every depth. Meanwhile E(g_n) = 0.
 *
 * Depths up to `lp_depth` are also solved as maximal-extension LPs on
 * S^{n+1} with the cylinder functions of the first n coordinates as M.
 */
GapDemoResult hat_vs_bar_gap_demo(const MarginalFamily& family, std::size_t depth, std::size_t lp_depth = 4);

} // namespace robustexp
