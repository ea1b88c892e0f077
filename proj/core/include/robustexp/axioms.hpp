#pragma once

#include "robustexp/expectation.hpp"

#include <span>
#include <string>
#include <vector>

namespace robustexp {

struct AxiomCheck {
    std::string name;
    bool passed = true;
    double worst_violation = 0.0;
    std::size_t cases = 0;
};

/**
 * Result of probing an expectation for the nonlinear-expectation axioms.
 * Positive homogeneity is reported separately: it is the extra property
 * that makes a convex expectation sublinear.
 */
struct AxiomReport {
    AxiomCheck monotonicity{"monotonicity"};
    AxiomCheck constant_preserving{"constant_preserving"};
    AxiomCheck translation{"translation"};
    AxiomCheck lipschitz{"lipschitz"};
    AxiomCheck convexity{"convexity"};
    AxiomCheck positive_homogeneity{"positive_homogeneity"};

    /// Monotone, constant preserving, translation invariant, 1-Lipschitz, convex.
    bool convex_expectation() const noexcept;
    bool sublinear() const noexcept;
    std::vector<const AxiomCheck*> checks() const;
};

/// Throws ArgumentError with fewer than two samples; DimensionError on a
/// sample from another space.
AxiomReport verify_axioms(const ExpectationModel& model, std::span<const RandomVariable> samples,
                          double tol = 1e-12);

} // namespace robustexp
