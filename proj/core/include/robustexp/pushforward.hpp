#pragma once

#include "robustexp/expectation.hpp"

#include <cstddef>
#include <vector>

namespace robustexp {

/// T : Omega -> Omega0 given by target indices, one per source state.
using StateMap = std::vector<std::size_t>;

/// Y o T for Y on the target space.
RandomVariable pull_back(const RandomVariable& y, const StateMap& map, const StateSpace& source);

/// mu o T^-1.
Scenario push_scenario(const Scenario& mu, const StateMap& map, const StateSpace& target);

/**
 * Image expectation Y -> E(Y o T). Penalty-dual models map to penalty-dual
 * models with pushed scenarios (deduplicated, smallest penalty kept);
 * other kinds become oracle evaluators.
 */
ExpectationModel pushforward(const ExpectationModel& model, const StateMap& map, const StateSpace& target);

} // namespace robustexp
