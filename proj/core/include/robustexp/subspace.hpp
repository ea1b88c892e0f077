#pragma once

#include "robustexp/expectation.hpp"

#include <memory>
#include <span>
#include <vector>

namespace robustexp {

/**
 * A pre-expectation on a linear subspace M = span(basis) of functions on a
 * finite space. The constant 1 must lie in M and the basis must be linearly
 * independent. The expectation is a model on the whole space; only its
 * values on M are meaningful.
 */
class SubspaceModel {
  public:
    SubspaceModel(std::vector<RandomVariable> basis, ExpectationModel expectation);

    /// M = constants.
    static SubspaceModel constants(ExpectationModel expectation);

    const StateSpace& space() const noexcept;
    const std::vector<RandomVariable>& basis() const noexcept;
    const ExpectationModel& expectation() const noexcept;
    std::size_t dimension() const noexcept;

    /// Least-squares coefficients of x in the basis.
    std::vector<double> coefficients(std::span<const double> x) const;
    /// sup-norm distance between x and its projection onto M.
    double projection_residual(std::span<const double> x) const;
    bool contains(std::span<const double> x, double tol = 1e-9) const;
    /// B c.
    std::vector<double> combine(std::span<const double> c) const;

    /// E(x) for x in M; throws PreconditionError otherwise.
    double evaluate(const RandomVariable& x, double tol = 1e-9) const;

  private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

} // namespace robustexp
