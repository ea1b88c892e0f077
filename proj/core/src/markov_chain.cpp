#include "robustexp/markov_chain.hpp"

#include "robustexp/consistency.hpp"
#include "robustexp/errors.hpp"
#include "robustexp/parallel.hpp"

#include <cmath>
#include <map>
#include <set>

namespace robustexp {

namespace {

void require_chain_inputs(const OneStepOperator& op, const ExpectationModel& mu0, const FiniteSubset& j) {
    require_same_space(op.space(), mu0.space(), "markov chain");
    if (j.empty() || j != make_subset(j) || j.front() < 0)
        throw ArgumentError("markov chain: J must be a sorted subset of {0, 1, ...}");
}

/// (P^gap h)(x) for every x, then read off state x of each slice.
void reduce_level(const OneStepOperator& op, std::size_t gap, std::span<const double> g, std::vector<double>& out) {
    const std::size_t n = op.space().size();
    const std::size_t prefixes = g.size() / (n * n);
    out.assign(prefixes * n, 0.0);
    const auto k = op.kernel();
    parallel_for(prefixes, [&](std::size_t p) {
        for (std::size_t x = 0; x < n; ++x) {
            const auto slice = g.subspan((p * n + x) * n, n);
            if (gap == 1) {
                out[p * n + x] = k.apply_at(x, slice);
            } else {
                const auto h = op.power_apply(slice, gap - 1);
                out[p * n + x] = k.apply_at(x, h);
            }
        }
    });
}

} // namespace

std::vector<std::vector<double>> markov_stages(const OneStepOperator& op, const ExpectationModel& mu0,
                                               const FiniteSubset& j, std::span<const double> f) {
    require_chain_inputs(op, mu0, j);
    const std::size_t n = op.space().size();
    std::size_t expected = 1;
    for (std::size_t i = 0; i < j.size(); ++i)
        expected *= n;
    if (f.size() != expected)
        throw DimensionError("markov_eval: function is not on S^J");
    require_finite(f, "markov_eval");

    std::vector<std::vector<double>> stages{std::vector<double>(f.begin(), f.end())};
    for (std::size_t i = j.size() - 1; i >= 1; --i) {
        std::vector<double> next;
        reduce_level(op, static_cast<std::size_t>(j[i] - j[i - 1]), stages.back(), next);
        stages.push_back(std::move(next));
    }
    return stages;
}

double markov_eval(const OneStepOperator& op, const ExpectationModel& mu0, const FiniteSubset& j,
                   std::span<const double> f) {
    const auto stages = markov_stages(op, mu0, j, f);
    const auto h = op.power_apply(stages.back(), static_cast<std::size_t>(j.front()));
    return mu0.evaluate(h);
}

namespace {

using Key = std::vector<long long>;

/// Rows of P^g per state, by repeated product closure.
class PowerRows {
  public:
    PowerRows(RowSets one, std::size_t cap) : cap_(cap) { cache_.emplace(1, std::move(one)); }
    const RowSets& get(std::size_t g) {
        auto it = cache_.find(g);
        if (it != cache_.end())
            return it->second;
        auto rows = product_closure(cache_.at(1), get(g - 1), cap_);
        return cache_.emplace(g, std::move(rows)).first->second;
    }

  private:
    std::size_t cap_;
    std::map<std::size_t, RowSets> cache_;
};

/// Every nu = sum_p base(p) * (p, r_p) with r_p drawn from rows at last(p).
void extend(const std::vector<double>& base, std::size_t n, const RowSets& rows, bool append,
            std::set<Key>& seen, std::vector<std::vector<double>>& out, std::size_t cap) {
    std::vector<std::size_t> nodes;
    double combos = 1.0;
    for (std::size_t p = 0; p < base.size(); ++p)
        if (base[p] > 0.0) {
            nodes.push_back(p);
            combos *= static_cast<double>(rows[p % n].size());
        }
    if (combos + static_cast<double>(out.size()) > static_cast<double>(cap) * 4.0)
        throw ArgumentError("markov_scenarios: scenario-form cap exceeded");
    std::vector<std::size_t> pick(nodes.size(), 0);
    const std::size_t width = append ? base.size() * n : n;
    while (true) {
        std::vector<double> nu(width, 0.0);
        for (std::size_t s = 0; s < nodes.size(); ++s) {
            const std::size_t p = nodes[s];
            const auto& r = rows[p % n][pick[s]];
            for (std::size_t y = 0; y < n; ++y)
                nu[append ? p * n + y : y] += base[p] * r[y];
        }
        if (seen.insert(canonical_key(nu)).second) {
            out.push_back(std::move(nu));
            if (out.size() > cap)
                throw ArgumentError("markov_scenarios: scenario-form cap exceeded");
        }
        std::size_t s = 0;
        for (; s < nodes.size(); ++s) {
            if (++pick[s] < rows[nodes[s] % n].size())
                break;
            pick[s] = 0;
        }
        if (s == nodes.size())
            break;
    }
}

} // namespace

PenaltyModel markov_scenarios(const OneStepOperator& op, const ExpectationModel& mu0, const FiniteSubset& j,
                              std::size_t cap) {
    require_chain_inputs(op, mu0, j);
    if (op.form() != OperatorForm::sublinear)
        throw PreconditionError("markov_scenarios: operator must be sublinear");
    const auto* pm0 = mu0.penalty();
    if (!pm0 || !pm0->is_sublinear())
        throw PreconditionError("markov_scenarios: initial expectation must be sublinear penalty-dual");
    const std::size_t n = op.space().size();
    PowerRows power(op.row_sets(), cap);

    std::vector<std::vector<double>> level;
    {
        std::set<Key> seen;
        for (const auto& pi : pm0->scenarios()) {
            std::vector<double> w(pi.weights().begin(), pi.weights().end());
            if (j.front() == 0) {
                if (seen.insert(canonical_key(w)).second)
                    level.push_back(std::move(w));
            } else {
                extend(w, n, power.get(static_cast<std::size_t>(j.front())), false, seen, level, cap);
            }
        }
    }
    for (std::size_t i = 1; i < j.size(); ++i) {
        const auto& rows = power.get(static_cast<std::size_t>(j[i] - j[i - 1]));
        std::vector<std::vector<double>> next;
        std::set<Key> seen;
        for (const auto& nu : level)
            extend(nu, n, rows, true, seen, next, cap);
        level = std::move(next);
    }

    const auto sp = product_space(op.space(), j);
    std::vector<Scenario> sc;
    sc.reserve(level.size());
    for (auto& w : level)
        sc.emplace_back(sp, std::move(w));
    return PenaltyModel::sublinear(std::move(sc));
}

MarginalFamily markov_chain_family(const OneStepOperator& op, const ExpectationModel& mu0, std::size_t horizon,
                                   FamilyForm form, std::size_t cap) {
    if (horizon < 1)
        throw ArgumentError("markov_chain_family: horizon must be at least 1");
    require_same_space(op.space(), mu0.space(), "markov_chain_family");
    const double paths = std::pow(static_cast<double>(op.space().size()), static_cast<double>(horizon + 1));
    if (paths > static_cast<double>(kProductCap))
        throw ArgumentError("markov_chain_family: |S|^(horizon+1) exceeds the desk-scale cap");
    if (!op.passes_verification())
        throw PreconditionError("markov_chain_family: operator fails axiom verification");
    if (form == FamilyForm::scenario) {
        return MarginalFamily(
            op.space(),
            [op, mu0, cap](const FiniteSubset& j) { return ExpectationModel(markov_scenarios(op, mu0, j, cap)); },
            static_cast<Index>(horizon), "markov chain (scenario form)");
    }
    return MarginalFamily(
        op.space(),
        [op, mu0](const FiniteSubset& j) {
            return ExpectationModel::oracle(
                product_space(op.space(), j),
                [op, mu0, j](std::span<const double> f) { return markov_eval(op, mu0, j, f); },
                "markov chain E_" + to_string(j));
        },
        static_cast<Index>(horizon), "markov chain");
}

double two_point_identity_check(const MarginalFamily& family, const OneStepOperator& op, const ExpectationModel& mu0,
                                std::span<const double> f, std::span<const double> g, Index k, Index l) {
    if (!(k < l) || k < 0)
        throw ArgumentError("two_point_identity_check: need 0 <= k < l");
    const std::size_t n = op.space().size();
    if (f.size() != n || g.size() != n)
        throw DimensionError("two_point_identity_check: f and g must be functions on S");
    const FiniteSubset j{k, l};
    const auto sp = product_space(op.space(), j);
    std::vector<double> h(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            h[a * n + b] = f[a] * g[b];
    const double lhs = cylinder_eval(family, CylinderFunction(j, RandomVariable(sp, std::move(h))));

    auto inner = op.power_apply(g, static_cast<std::size_t>(l - k));
    for (std::size_t a = 0; a < n; ++a)
        inner[a] *= f[a];
    const double rhs = mu0.evaluate(op.power_apply(inner, static_cast<std::size_t>(k)));
    return std::abs(lhs - rhs);
}

} // namespace robustexp
