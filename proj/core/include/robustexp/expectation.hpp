#pragma once

#include "robustexp/state_space.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace robustexp {

/**
 * A convex expectation in dual form: a finite list of scenarios mu_k with
 * penalties alpha_k >= 0, evaluated as
 *
 *     E(X) = max_k ( mu_k X - alpha_k ).
 *
 * A scenario with infinite penalty is simply absent. At least one penalty is
 * zero, otherwise E(0) != 0. All penalties zero means E is sublinear.
 */
class PenaltyModel {
  public:
    PenaltyModel(std::vector<Scenario> scenarios, std::vector<double> penalties);

    static PenaltyModel sublinear(std::vector<Scenario> scenarios);
    static PenaltyModel linear(Scenario scenario);

    const StateSpace& space() const noexcept { return scenarios_.front().space(); }
    const std::vector<Scenario>& scenarios() const noexcept { return scenarios_; }
    const std::vector<double>& penalties() const noexcept { return penalties_; }
    std::size_t size() const noexcept { return scenarios_.size(); }
    bool is_sublinear() const noexcept;

  private:
    std::vector<Scenario> scenarios_;
    std::vector<double> penalties_;
};

struct DualValue {
    double value = 0.0;
    std::size_t argmax = 0; ///< smallest index attaining the max
};

/// max_k (mu_k x - alpha_k) with the smallest maximizing index.
DualValue dual_eval(const PenaltyModel& pm, const RandomVariable& x);
/// Same, for a raw vector on the model's space (length checked).
DualValue dual_eval(const PenaltyModel& pm, std::span<const double> x);

/// Entropic expectation theta^-1 log sum_i p_i exp(theta x_i).
struct EntropicModel {
    EntropicModel(Scenario reference, double theta);
    Scenario reference;
    double theta;
};

double entropic_eval(const EntropicModel& m, std::span<const double> x);

using Evaluator = std::function<double(std::span<const double>)>;

enum class ModelKind { penalty_dual, entropic, oracle };

const char* to_string(ModelKind k) noexcept;

/**
 * Handle to an expectation on a finite space. Immutable; copies share state.
 *
 * The oracle kind wraps a user evaluator. It is not assumed to satisfy any
 * axiom; use verify_axioms to check.
 */
class ExpectationModel {
  public:
    ExpectationModel(PenaltyModel pm);
    ExpectationModel(EntropicModel em);
    static ExpectationModel oracle(StateSpace space, Evaluator fn, std::string description = {});

    ModelKind kind() const noexcept;
    const StateSpace& space() const noexcept;
    const std::string& description() const noexcept;

    /// nullptr unless kind() == penalty_dual.
    const PenaltyModel* penalty() const noexcept;
    /// nullptr unless kind() == entropic.
    const EntropicModel* entropic() const noexcept;

    double evaluate(const RandomVariable& x) const;
    double evaluate(std::span<const double> x) const;

  private:
    struct Impl;
    explicit ExpectationModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

double evaluate(const ExpectationModel& model, const RandomVariable& x);

/// Rounds to 12 decimals; two vectors are duplicates iff their keys are equal.
std::vector<long long> canonical_key(std::span<const double> v);

/// Removes duplicate scenarios (canonical key), keeping the smallest penalty
/// and first-occurrence order.
PenaltyModel deduplicate(const PenaltyModel& pm);

} // namespace robustexp
