#pragma once

#include "robustexp/extension.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace robustexp {

struct ContinuityWitness {
    std::size_t sequence = 0;
    /// Offending scenario; empty when the check ran on an evaluator.
    std::optional<std::size_t> scenario;
    std::size_t term = 0;
    double gap = 0.0;
};

struct ContinuityReport {
    bool pass = true;
    double worst_gap = 0.0;
    std::optional<ContinuityWitness> witness;
};

/**
 * Scenario-wise continuity from above: for every scenario and sequence,
 * |mu.X_K - mu.X| <= tol where K = terms - 1 and X is the stated limit.
 * Sequences without a limit use their term K as the limit.
 */
ContinuityReport continuity_from_above_check(const PenaltyModel& pm, std::span<const RVSequence> seqs,
                                             double tol = 1e-9, std::size_t terms = 64);

/// Same test on the expectation itself: |E(X_K) - E(X)| <= tol.
ContinuityReport continuity_from_above_check(const ExpectationModel& model, std::span<const RVSequence> seqs,
                                             double tol = 1e-9, std::size_t terms = 64);

/// Inclusive index window [lo, hi] on a gridded line.
struct Window {
    std::size_t lo = 0;
    std::size_t hi = 0;
};

struct TightnessReport {
    bool pass = true;
    /// sup over scenarios of the mass outside each window.
    std::vector<double> outside_mass;
    /// sup over scenarios of mu.X_K for each sequence.
    std::vector<double> sup_expectation;
    /// max over the last window of |X_K| for each sequence.
    std::vector<double> inside_sup;
};

/**
 * Tightness criterion for continuity from above: passes iff the outside
 * mass of the last window is <= tol and every decreasing sequence has
 * sup_mu mu.X_K <= tol at K = terms - 1. Throws ArgumentError unless the
 * windows are nested increasingly.
 */
TightnessReport tightness_continuity_check(const std::vector<Scenario>& scenarios, const std::vector<Window>& compacts,
                                           std::span<const RVSequence> seqs, double tol = 1e-6,
                                           std::size_t terms = 64);

} // namespace robustexp
