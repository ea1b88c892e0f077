#pragma once

#include <cstddef>
#include <vector>

namespace robustexp {

/// Gauss-Hermite rule for the standard normal: sum_i w_i g(z_i) ~ E g(Z).
/// Weights sum to 1 and the rule is symmetric about 0; exact for
/// polynomials of degree < 2 * order.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Golub-Welsch on the probabilists' Hermite recurrence. Rules are cached
/// per order. Throws ArgumentError for order 0 or order > 200.
const QuadratureRule& gauss_hermite(std::size_t order);

} // namespace robustexp
