#pragma once

#include "robustexp/pushforward.hpp"
#include "robustexp/state_space.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace robustexp {

/// Sorted, duplicate-free, nonempty tuple of coordinate indices.
using FiniteSubset = std::vector<Index>;

/// Desk-scale cap on |S|^|J|.
inline constexpr std::size_t kProductCap = 1'000'000;

/// Sorts and validates; throws ArgumentError on duplicates or emptiness.
FiniteSubset make_subset(std::vector<Index> indices);
bool is_subset(const FiniteSubset& k, const FiniteSubset& j);
FiniteSubset subset_union(const FiniteSubset& a, const FiniteSubset& b);
/// "{0,2,3}"
std::string to_string(const FiniteSubset& j);
/// Parses "{0,2,3}" or "0,2,3".
FiniteSubset parse_subset(const std::string& text);

/// S^J; throws ArgumentError beyond kProductCap.
StateSpace product_space(const StateSpace& base, const FiniteSubset& j);

/// Digits of a lexicographic tuple index, first coordinate most significant.
std::vector<std::size_t> tuple_of(std::size_t index, std::size_t base_size, std::size_t length);
std::size_t index_of_tuple(const std::vector<std::size_t>& tuple, std::size_t base_size);

/// pr_{JK} as a state map S^J -> S^K.
StateMap projection_map(std::size_t base_size, const FiniteSubset& j, const FiniteSubset& k);

/// f o pr_{JK} for f on S^K (K read from f's space).
RandomVariable project_function(const RandomVariable& f, const FiniteSubset& j);

/// A path functional depending on the coordinates J only.
struct CylinderFunction {
    CylinderFunction(FiniteSubset j, RandomVariable f);
    FiniteSubset j;
    RandomVariable f;
};

/// The same function written over J' containing J.
CylinderFunction reexpress(const CylinderFunction& g, const FiniteSubset& j_prime);

} // namespace robustexp
