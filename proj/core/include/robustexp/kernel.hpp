#pragma once

#include "robustexp/axioms.hpp"
#include "robustexp/expectation.hpp"
#include "robustexp/product_space.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace robustexp {

using Row = std::vector<double>;
using Matrix = std::vector<Row>;
/// Transition rows available at each state.
using RowSets = std::vector<std::vector<Row>>;

/**
 * A nonlinear kernel on a finite space: x -> E(x, f). Stored as an
 * evaluator f -> E(., f), optionally with per-state models and, for
 * sublinear kernels, the row set at each state (E(x, f) = max_r r.f).
 */
class NonlinearKernel {
  public:
    using Apply = std::function<std::vector<double>(std::span<const double>)>;

    /// One model per state, each on `domain`.
    NonlinearKernel(StateSpace domain, std::vector<ExpectationModel> per_state);
    /// Sublinear kernel with the given rows at each state.
    static NonlinearKernel from_rows(StateSpace domain, RowSets rows);
    static NonlinearKernel from_evaluator(StateSpace domain, Apply apply, std::string description = {});
    static NonlinearKernel identity(StateSpace domain);

    const StateSpace& domain() const noexcept;
    const std::string& description() const noexcept;
    /// Row sets when the kernel is sublinear with a known finite row list.
    const std::optional<RowSets>& rows() const noexcept;

    std::vector<double> apply(std::span<const double> f) const;
    RandomVariable apply(const RandomVariable& f) const;
    /// E(x, f) for one state.
    double apply_at(std::size_t x, std::span<const double> f) const;
    /// The model f -> E(x, f).
    ExpectationModel state_model(std::size_t x) const;

  private:
    struct Impl;
    explicit NonlinearKernel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// E(., f) as a random variable on the kernel's domain.
RandomVariable kernel_apply(const NonlinearKernel& k, const RandomVariable& f);

/**
 * Product input: f on S^J with |J| >= 2. Returns g on S^{J without its last
 * coordinate} with g(x_1..x_{n-1}) = E(x_{n-1}, f(x_1..x_{n-1}, .)).
 */
RandomVariable kernel_apply_last(const NonlinearKernel& k, const RandomVariable& f);

/// Same on raw row-major storage: `prefixes` blocks of S x S values.
std::vector<double> apply_last_axis(const NonlinearKernel& k, std::span<const double> values, std::size_t prefixes);

/// (k0 k1)(x, f) = k0(x, k1(., f)).
NonlinearKernel compose(const NonlinearKernel& k0, const NonlinearKernel& k1);

/**
 * Row sets of the composition of two sublinear kernels: at x, every
 * sum_y a_y r_y with a a row of k0 at x and r_y any row of k1 at y (chosen
 * independently per y). Deduplicated. Throws ArgumentError beyond `cap` rows
 * at one state.
 */
RowSets product_closure(const RowSets& r0, const RowSets& r1, std::size_t cap = 100000);

/// All matrices whose x-th row is drawn from rows[x].
std::vector<Matrix> rectangular_closure(const RowSets& rows, std::size_t cap = 100000);

/// Lifted kernel on S x T: ((x, y), f) -> E(x, f(., y)). States (x, y) are
/// enumerated with x major; labels are "x,y".
NonlinearKernel lift_parameter(const NonlinearKernel& k, const StateSpace& aux);
StateSpace pair_space(const StateSpace& s, const StateSpace& t);

enum class OperatorForm { sublinear, convex, entropic };

const char* to_string(OperatorForm f) noexcept;

/**
 * One-step operator P on f: S -> R.
 *   sublinear: (Pf)(x) = max_k (A_k f)(x)
 *   convex:    (Pf)(x) = max_k (A_k f)(x) - alpha_k, min alpha = 0
 *   entropic:  (Pf)(x) = theta^-1 log sum_y P(x,y) exp(theta f(y))
 * Matrices are row-stochastic within 1e-12.
 */
class OneStepOperator {
  public:
    static OneStepOperator linear(StateSpace space, Matrix p);
    static OneStepOperator sublinear(StateSpace space, std::vector<Matrix> matrices);
    static OneStepOperator convex(StateSpace space, std::vector<Matrix> matrices, std::vector<double> penalties);
    static OneStepOperator entropic(StateSpace space, Matrix reference, double theta);

    const StateSpace& space() const noexcept { return space_; }
    OperatorForm form() const noexcept { return form_; }
    const std::vector<Matrix>& matrices() const noexcept { return matrices_; }
    const std::vector<double>& penalties() const noexcept { return penalties_; }
    double theta() const noexcept { return theta_; }
    bool is_linear() const noexcept;

    /// Row sets per state (sublinear form only).
    RowSets row_sets() const;
    NonlinearKernel kernel() const;
    std::vector<double> apply(std::span<const double> f) const;
    /// P^k f.
    std::vector<double> power_apply(std::span<const double> f, std::size_t k) const;

    /// Axioms of every state model on `samples` random probes.
    std::vector<AxiomReport> verify(std::size_t samples = 12, std::uint64_t seed = 1) const;
    bool passes_verification(std::size_t samples = 12, std::uint64_t seed = 1) const;

  private:
    OneStepOperator(StateSpace space, OperatorForm form, std::vector<Matrix> matrices, std::vector<double> penalties,
                    double theta);
    StateSpace space_;
    OperatorForm form_;
    std::vector<Matrix> matrices_;
    std::vector<double> penalties_;
    double theta_ = 0.0;
    NonlinearKernel kernel_;
};

/// Kernels E_{s,t} on a time grid, s < t.
class KernelFamily {
  public:
    explicit KernelFamily(std::vector<double> times);
    /// E_{k,l} = P^{l-k} on times 0..horizon.
    static KernelFamily powers(const OneStepOperator& op, std::size_t horizon);

    const std::vector<double>& times() const noexcept { return times_; }
    void set(double s, double t, NonlinearKernel k);
    bool has(double s, double t) const;
    const NonlinearKernel& get(double s, double t) const;

  private:
    std::vector<double> times_;
    std::map<std::pair<double, double>, NonlinearKernel> kernels_;
};

struct ChapmanRow {
    double s = 0.0, t = 0.0, u = 0.0;
    double max_discrepancy = 0.0;
    bool pass = true;
    std::optional<std::size_t> witness_state;
    std::optional<std::vector<double>> witness_f;
};

struct ChapmanReport {
    std::vector<ChapmanRow> rows;
    double tol = 1e-9;
    bool pass() const noexcept;
    const ChapmanRow* first_failure() const noexcept;
    /// Header "schema,s,t,u,max_discrepancy,pass".
    std::string to_csv() const;
};

struct TimeTriple {
    double s, t, u;
};

/// All s < t < u on the family's grid.
std::vector<TimeTriple> all_triples(const KernelFamily& fam);

/// max over probes and states of |E_{s,u}(x,f) - E_{s,t}(x, E_{t,u}(., f))|.
ChapmanReport chapman_check(const KernelFamily& fam, const std::vector<TimeTriple>& triples, std::size_t probes,
                            std::uint64_t seed = 0, double tol = 1e-9);

} // namespace robustexp
