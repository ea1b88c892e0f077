#include "robustexp/consistency.hpp"

#include "robustexp/conjugate.hpp"
#include "robustexp/errors.hpp"
#include "robustexp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

namespace robustexp {

bool ConsistencyReport::pass() const noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const ConsistencyRow& r) { return r.pass; });
}

const ConsistencyRow* ConsistencyReport::first_failure() const noexcept {
    for (const auto& r : rows)
        if (!r.pass)
            return &r;
    return nullptr;
}

double ConsistencyReport::max_discrepancy() const noexcept {
    double m = 0.0;
    for (const auto& r : rows)
        m = std::max(m, r.max_discrepancy);
    return m;
}

std::string ConsistencyReport::to_csv() const {
    std::string out = "schema,J,K,max_discrepancy,pass\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.17g", r.max_discrepancy);
        out += "v1,\"" + to_string(r.j) + "\",\"" + to_string(r.k) + "\"," + buf + "," + (r.pass ? "true" : "false") +
               "\n";
    }
    return out;
}

namespace {

void require_pair(const MarginalFamily& family, const SubsetPair& p) {
    if (!is_subset(p.second, p.first))
        throw ArgumentError("consistency: " + to_string(p.second) + " is not a subset of " + to_string(p.first));
    for (const auto* s : {&p.first, &p.second})
        if (!family.has_entry(*s))
            throw ArgumentError("consistency: family has no entry for " + to_string(*s));
}

ConsistencyRow primal_row(const MarginalFamily& family, const SubsetPair& p, std::size_t probes, std::uint64_t seed,
                          double tol) {
    const auto& [j, k] = p;
    const auto ej = family.entry(j);
    const auto ek = family.entry(k);
    const std::size_t nb = family.base().size();
    const auto map = projection_map(nb, j, k);
    const std::size_t nk = ek.space().size();

    ConsistencyRow row{j, k, 0.0, true, std::nullopt, {}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> f(nk), lifted(map.size());
    const std::size_t total = 2 * nk + probes;
    for (std::size_t t = 0; t < total; ++t) {
        if (t < 2 * nk) {
            std::fill(f.begin(), f.end(), 0.0);
            f[t % nk] = t < nk ? 1.0 : -1.0;
        } else {
            for (auto& v : f)
                v = u(rng);
        }
        for (std::size_t i = 0; i < map.size(); ++i)
            lifted[i] = f[map[i]];
        const double gap = std::abs(ek.evaluate(f) - ej.evaluate(lifted));
        if (gap > row.max_discrepancy) {
            row.max_discrepancy = gap;
            if (gap > tol)
                row.witness = f;
        }
    }
    row.pass = row.max_discrepancy <= tol;
    if (!row.pass)
        row.note = "E_K(f) != E_J(f o pr_JK) for the witness f";
    return row;
}

using Key = std::vector<long long>;

ConsistencyRow dual_row(const MarginalFamily& family, const SubsetPair& p, double tol) {
    const auto& [j, k] = p;
    const auto& qj = family.penalty_entry(j);
    const auto& qk = family.penalty_entry(k);
    if (!qj.is_sublinear() || !qk.is_sublinear())
        throw PreconditionError("check_consistency_scenario_sets: entries must be sublinear");
    const auto target_space = product_space(family.base(), k);
    const auto map = projection_map(family.base().size(), j, k);

    std::vector<std::vector<double>> pushed;
    std::set<Key> pushed_keys;
    for (const auto& mu : qj.scenarios()) {
        std::vector<double> w(target_space.size(), 0.0);
        const auto src = mu.weights();
        for (std::size_t i = 0; i < map.size(); ++i)
            w[map[i]] += src[i];
        if (pushed_keys.insert(canonical_key(w)).second)
            pushed.push_back(std::move(w));
    }
    std::vector<std::span<const double>> pushed_spans(pushed.begin(), pushed.end());
    std::vector<std::span<const double>> target_spans;
    std::set<Key> target_keys;
    for (const auto& nu : qk.scenarios()) {
        target_spans.push_back(nu.weights());
        target_keys.insert(canonical_key(nu.weights()));
    }

    ConsistencyRow row{j, k, 0.0, true, std::nullopt, {}};
    auto test = [&](const std::vector<std::span<const double>>& hull, const std::set<Key>& keys,
                    std::span<const double> point, const char* what) {
        if (keys.count(canonical_key(point)))
            return true;
        const double d = hull_distance(hull, point);
        row.max_discrepancy = std::max(row.max_discrepancy, d);
        if (d > tol) {
            row.pass = false;
            row.witness = hull_separator(hull, point);
            row.note = what;
            return false;
        }
        return true;
    };
    for (const auto& w : pushed_spans)
        if (!test(target_spans, target_keys, w, "pushed scenario of Q_J outside Q_K"))
            return row;
    for (const auto& w : target_spans)
        if (!test(pushed_spans, pushed_keys, w, "scenario of Q_K outside the image of Q_J"))
            return row;
    return row;
}

} // namespace

ConsistencyReport check_consistency_expectations(const MarginalFamily& family, const std::vector<SubsetPair>& pairs,
                                                 std::size_t probes, std::uint64_t seed, double tol) {
    for (const auto& p : pairs)
        require_pair(family, p);
    ConsistencyReport rep;
    rep.tol = tol;
    rep.rows.resize(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
        rep.rows[i] = primal_row(family, pairs[i], probes, seed + 0x9e3779b97f4a7c15ULL * (i + 1), tol);
    });
    return rep;
}

ConsistencyReport check_consistency_scenario_sets(const MarginalFamily& family, const std::vector<SubsetPair>& pairs,
                                                  double tol) {
    for (const auto& p : pairs)
        require_pair(family, p);
    ConsistencyReport rep;
    rep.tol = tol;
    rep.rows.resize(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) { rep.rows[i] = dual_row(family, pairs[i], tol); });
    return rep;
}

std::vector<SubsetPair> all_pairs(const std::vector<FiniteSubset>& sets) {
    std::vector<SubsetPair> out;
    for (const auto& j : sets) {
        const std::size_t n = j.size();
        for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
            FiniteSubset k;
            for (std::size_t b = 0; b < n; ++b)
                if (mask & (std::size_t{1} << b))
                    k.push_back(j[b]);
            out.emplace_back(j, std::move(k));
        }
    }
    return out;
}

double cylinder_eval(const MarginalFamily& family, const CylinderFunction& g, bool check) {
    if (!(g.f.space().base() == family.base()))
        throw DimensionError("cylinder_eval: function is over a different base space");
    if (check && g.j.size() > 1 && !family.is_verified(g.j)) {
        std::vector<SubsetPair> pairs;
        for (std::size_t drop = 0; drop < g.j.size(); ++drop) {
            FiniteSubset k;
            for (std::size_t b = 0; b < g.j.size(); ++b)
                if (b != drop)
                    k.push_back(g.j[b]);
            pairs.emplace_back(g.j, std::move(k));
        }
        const auto rep = check_consistency_expectations(family, pairs, 8, 0);
        if (const auto* bad = rep.first_failure())
            throw ConsistencyError("cylinder_eval: family is inconsistent on J=" + to_string(bad->j) +
                                       " K=" + to_string(bad->k),
                                   to_string(bad->j) + ";" + to_string(bad->k));
        family.mark_verified(g.j);
    }
    return family.entry(g.j).evaluate(g.f);
}

ExpectationModel pushforward_marginal(const ExpectationModel& model, const FiniteSubset& j, const FiniteSubset& k) {
    const auto& sp = model.space();
    if (!sp.is_product() || sp.coordinates() != j)
        throw DimensionError("pushforward_marginal: model is not on S^" + to_string(j));
    const auto base = sp.base();
    if (k == j)
        return model;
    return pushforward(model, projection_map(base.size(), j, k), product_space(base, k));
}

ExtensionMarginal extension_marginal(const MarginalFamily& family, const FiniteSubset& j, double tol) {
    const Index top = family.max_index().value_or(j.back() + 1);
    std::vector<SubsetPair> pairs;
    for (Index i = 0; i <= top; ++i) {
        if (std::binary_search(j.begin(), j.end(), i))
            continue;
        auto sup = subset_union(j, {i});
        if (family.has_entry(sup))
            pairs.emplace_back(std::move(sup), j);
    }
    const auto rep = check_consistency_scenario_sets(family, pairs, tol);
    if (const auto* bad = rep.first_failure())
        throw ConsistencyError("extension_marginal: Q_" + to_string(j) + " is not the image of Q_" +
                                   to_string(bad->j),
                               to_string(bad->j) + ";" + to_string(bad->k));
    ExtensionMarginal out{family.penalty_entry(j), false, {}};
    for (const auto& p : pairs)
        out.verified_against.push_back(p.first);
    return out;
}

} // namespace robustexp
