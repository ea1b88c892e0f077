#pragma once

#include "robustexp/kernel.hpp"
#include "robustexp/marginal_family.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace robustexp {

enum class FamilyForm { evaluator, scenario };

/// Largest number of path measures generated for one scenario-form entry.
inline constexpr std::size_t kScenarioCap = 20000;

/**
 * E_J(f) by backward induction over the last coordinate of J:
 *   g(x_1..x_{n-1}) = (P^{k_n - k_{n-1}} f(x_1..x_{n-1}, .))(x_{n-1}),
 * down to E_{k_1}(h) = mu0(P^{k_1} h).
 */
double markov_eval(const OneStepOperator& op, const ExpectationModel& mu0, const FiniteSubset& j,
                   std::span<const double> f);

/// Intermediate tensors of markov_eval: stage i is the function on the first
/// n - i coordinates of J (stage 0 is f); the last stage has |S| entries.
std::vector<std::vector<double>> markov_stages(const OneStepOperator& op, const ExpectationModel& mu0,
                                               const FiniteSubset& j, std::span<const double> f);

/**
 * Path measures on S^J generated by history-dependent row selections:
 * every reachable node picks a row of P^{gap} independently. Requires a
 * sublinear operator and a sublinear penalty-dual mu0. Throws ArgumentError
 * when more than `cap` measures would be generated.
 */
PenaltyModel markov_scenarios(const OneStepOperator& op, const ExpectationModel& mu0, const FiniteSubset& j,
                              std::size_t cap = kScenarioCap);

/**
 * The consistent family E_J on subsets of {0, ..., horizon}. Evaluator form
 * runs markov_eval; scenario form stores markov_scenarios. Throws
 * ArgumentError if |S|^(horizon+1) exceeds the desk-scale cap and
 * PreconditionError if the operator fails axiom verification.
 */
MarginalFamily markov_chain_family(const OneStepOperator& op, const ExpectationModel& mu0, std::size_t horizon,
                                   FamilyForm form = FamilyForm::evaluator, std::size_t cap = kScenarioCap);

/// |E((f o pr_k)(g o pr_l)) - mu0(P^k(f P^{l-k} g))| with the left side from the family.
/// Zero for linear operators, and for sublinear ones when f >= 0. Convex and
/// entropic operators are not positively homogeneous and generally leave a gap.
double two_point_identity_check(const MarginalFamily& family, const OneStepOperator& op, const ExpectationModel& mu0,
                                std::span<const double> f, std::span<const double> g, Index k, Index l);

} // namespace robustexp
