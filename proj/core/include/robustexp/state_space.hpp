#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace robustexp {

/// Time or coordinate index of a path-space coordinate.
using Index = int;

/**
 * A finite, labeled state space. The full power set is the sigma-algebra,
 * so random variables are plain vectors indexed like the labels.
 *
 * Copies share the label storage. Product spaces S^J carry their base and
 * coordinate set instead of materialized labels; states are enumerated
 * lexicographically with the first coordinate most significant.
 */
class StateSpace {
  public:
    explicit StateSpace(std::vector<std::string> labels);

    /// Space with labels "0", "1", ..., "n-1".
    static StateSpace indexed(std::size_t n);
    /// The product S^J over the sorted coordinate set `coords`.
    static StateSpace product(const StateSpace& base, std::vector<Index> coords);

    std::size_t size() const noexcept;
    std::string label(std::size_t i) const;
    std::optional<std::size_t> index_of(std::string_view label) const;

    bool is_product() const noexcept;
    /// Base space of a product space; the space itself otherwise.
    StateSpace base() const;
    /// Coordinates of a product space; empty otherwise.
    const std::vector<Index>& coordinates() const;

    bool operator==(const StateSpace& other) const;

  private:
    struct Impl;
    explicit StateSpace(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

/// A bounded random variable X on a finite space (a payoff vector).
class RandomVariable {
  public:
    RandomVariable(StateSpace space, std::vector<double> values);

    static RandomVariable constant(const StateSpace& space, double alpha);
    static RandomVariable indicator(const StateSpace& space, std::size_t state);

    const StateSpace& space() const noexcept { return space_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    double sup_norm() const;
    double min() const;
    double max() const;

  private:
    StateSpace space_;
    std::vector<double> values_;
};

/// A probability vector on a finite space.
class Scenario {
  public:
    /// Throws DomainError unless weights are >= 0 and sum to 1 within 1e-12.
    Scenario(StateSpace space, std::vector<double> weights);

    static Scenario dirac(const StateSpace& space, std::size_t state);
    static Scenario uniform(const StateSpace& space);

    const StateSpace& space() const noexcept { return space_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }

    /// Integral of x against this measure.
    double expect(std::span<const double> x) const;

  private:
    StateSpace space_;
    std::vector<double> weights_;
};

/// Tolerance on the total mass of a Scenario.
inline constexpr double kMassTolerance = 1e-12;

/// Throws DimensionError if the spaces differ.
void require_same_space(const StateSpace& a, const StateSpace& b, const char* context);

/// Throws DomainError if any entry is NaN or infinite.
void require_finite(std::span<const double> v, const char* context);

} // namespace robustexp
