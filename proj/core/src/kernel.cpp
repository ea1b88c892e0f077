#include "robustexp/kernel.hpp"

#include "robustexp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

namespace robustexp {

struct NonlinearKernel::Impl {
    StateSpace domain;
    Apply apply;
    std::vector<ExpectationModel> per_state; // empty for evaluator kernels
    std::optional<RowSets> rows;
    std::string description;
};

namespace {

void require_length(std::span<const double> f, std::size_t n, const char* ctx) {
    if (f.size() != n)
        throw DimensionError(std::string(ctx) + ": function length differs from the kernel domain");
    require_finite(f, ctx);
}

void require_stochastic(const Row& r, std::size_t n, const char* ctx) {
    if (r.size() != n)
        throw DimensionError(std::string(ctx) + ": row length mismatch");
    double s = 0.0;
    for (double v : r) {
        if (!std::isfinite(v) || v < 0.0)
            throw DomainError(std::string(ctx) + ": rows must be nonnegative");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-12)
        throw DomainError(std::string(ctx) + ": rows must sum to 1 within 1e-12");
}

} // namespace

NonlinearKernel::NonlinearKernel(StateSpace domain, std::vector<ExpectationModel> per_state) {
    if (per_state.size() != domain.size())
        throw DimensionError("NonlinearKernel: one model per state is required");
    bool all_rows = true;
    RowSets rows(domain.size());
    for (std::size_t x = 0; x < per_state.size(); ++x) {
        require_same_space(domain, per_state[x].space(), "NonlinearKernel");
        const auto* pm = per_state[x].penalty();
        if (pm && pm->is_sublinear()) {
            for (const auto& s : pm->scenarios())
                rows[x].emplace_back(s.weights().begin(), s.weights().end());
        } else {
            all_rows = false;
        }
    }
    auto models = per_state;
    Apply apply = [models](std::span<const double> f) {
        std::vector<double> out(models.size());
        for (std::size_t x = 0; x < models.size(); ++x)
            out[x] = models[x].evaluate(f);
        return out;
    };
    impl_ = std::make_shared<const Impl>(Impl{std::move(domain), std::move(apply), std::move(per_state),
                                              all_rows ? std::optional<RowSets>(std::move(rows)) : std::nullopt,
                                              "per-state models"});
}

NonlinearKernel NonlinearKernel::from_rows(StateSpace domain, RowSets rows) {
    if (rows.size() != domain.size())
        throw DimensionError("NonlinearKernel::from_rows: one row set per state is required");
    std::vector<ExpectationModel> models;
    for (const auto& rs : rows) {
        if (rs.empty())
            throw ArgumentError("NonlinearKernel::from_rows: empty row set");
        std::vector<Scenario> sc;
        for (const auto& r : rs) {
            require_stochastic(r, domain.size(), "NonlinearKernel::from_rows");
            sc.emplace_back(domain, r);
        }
        models.emplace_back(PenaltyModel::sublinear(std::move(sc)));
    }
    return {std::move(domain), std::move(models)};
}

NonlinearKernel NonlinearKernel::from_evaluator(StateSpace domain, Apply apply, std::string description) {
    if (!apply)
        throw ArgumentError("NonlinearKernel: empty evaluator");
    return NonlinearKernel(std::make_shared<const Impl>(
        Impl{std::move(domain), std::move(apply), {}, std::nullopt, std::move(description)}));
}

NonlinearKernel NonlinearKernel::identity(StateSpace domain) {
    RowSets rows(domain.size());
    for (std::size_t x = 0; x < domain.size(); ++x) {
        Row r(domain.size(), 0.0);
        r[x] = 1.0;
        rows[x].push_back(std::move(r));
    }
    return from_rows(std::move(domain), std::move(rows));
}

const StateSpace& NonlinearKernel::domain() const noexcept { return impl_->domain; }
const std::string& NonlinearKernel::description() const noexcept { return impl_->description; }
const std::optional<RowSets>& NonlinearKernel::rows() const noexcept { return impl_->rows; }

std::vector<double> NonlinearKernel::apply(std::span<const double> f) const {
    require_length(f, impl_->domain.size(), "kernel_apply");
    return impl_->apply(f);
}

RandomVariable NonlinearKernel::apply(const RandomVariable& f) const {
    require_same_space(impl_->domain, f.space(), "kernel_apply");
    return {impl_->domain, impl_->apply(f.values())};
}

double NonlinearKernel::apply_at(std::size_t x, std::span<const double> f) const {
    if (x >= impl_->domain.size())
        throw ArgumentError("kernel: state index out of range");
    if (!impl_->per_state.empty())
        return impl_->per_state[x].evaluate(f);
    return apply(f)[x];
}

ExpectationModel NonlinearKernel::state_model(std::size_t x) const {
    if (x >= impl_->domain.size())
        throw ArgumentError("kernel: state index out of range");
    if (!impl_->per_state.empty())
        return impl_->per_state[x];
    const auto self = *this;
    return ExpectationModel::oracle(
        impl_->domain, [self, x](std::span<const double> f) { return self.apply(f)[x]; },
        "state " + std::to_string(x) + " of " + impl_->description);
}

RandomVariable kernel_apply(const NonlinearKernel& k, const RandomVariable& f) {
    if (f.space().is_product() && !(f.space() == k.domain()))
        return kernel_apply_last(k, f);
    return k.apply(f);
}

std::vector<double> apply_last_axis(const NonlinearKernel& k, std::span<const double> values, std::size_t prefixes) {
    const std::size_t n = k.domain().size();
    if (values.size() != prefixes * n * n)
        throw DimensionError("apply_last_axis: tensor size mismatch");
    std::vector<double> out(prefixes * n);
    for (std::size_t p = 0; p < prefixes; ++p)
        for (std::size_t x = 0; x < n; ++x)
            out[p * n + x] = k.apply_at(x, values.subspan((p * n + x) * n, n));
    return out;
}

RandomVariable kernel_apply_last(const NonlinearKernel& k, const RandomVariable& f) {
    const auto& sp = f.space();
    if (!sp.is_product() || sp.coordinates().size() < 2)
        throw DimensionError("kernel_apply: product input needs at least two coordinates");
    if (!(sp.base() == k.domain()))
        throw DimensionError("kernel_apply: product base differs from the kernel domain");
    const std::size_t n = k.domain().size();
    FiniteSubset head(sp.coordinates().begin(), sp.coordinates().end() - 1);
    const std::size_t prefixes = f.size() / (n * n);
    return {product_space(k.domain(), head), apply_last_axis(k, f.values(), prefixes)};
}

NonlinearKernel compose(const NonlinearKernel& k0, const NonlinearKernel& k1) {
    require_same_space(k0.domain(), k1.domain(), "compose");
    return NonlinearKernel::from_evaluator(
        k0.domain(), [k0, k1](std::span<const double> f) { return k0.apply(k1.apply(f)); },
        "(" + k0.description() + ")(" + k1.description() + ")");
}

RowSets product_closure(const RowSets& r0, const RowSets& r1, std::size_t cap) {
    const std::size_t n = r0.size();
    if (r1.size() != n)
        throw DimensionError("product_closure: state counts differ");
    RowSets out(n);
    for (std::size_t x = 0; x < n; ++x) {
        std::set<std::vector<long long>> seen;
        for (const auto& a : r0[x]) {
            // rows r_y matter only where a_y > 0
            std::vector<std::size_t> support;
            for (std::size_t y = 0; y < n; ++y)
                if (a[y] > 0.0)
                    support.push_back(y);
            std::vector<std::size_t> pick(support.size(), 0);
            while (true) {
                Row r(n, 0.0);
                for (std::size_t s = 0; s < support.size(); ++s) {
                    const auto& ry = r1[support[s]][pick[s]];
                    for (std::size_t z = 0; z < n; ++z)
                        r[z] += a[support[s]] * ry[z];
                }
                if (seen.insert(canonical_key(r)).second) {
                    out[x].push_back(std::move(r));
                    if (out[x].size() > cap)
                        throw ArgumentError("product_closure: row cap exceeded");
                }
                std::size_t s = 0;
                for (; s < support.size(); ++s) {
                    if (++pick[s] < r1[support[s]].size())
                        break;
                    pick[s] = 0;
                }
                if (s == support.size())
                    break;
            }
        }
    }
    return out;
}

std::vector<Matrix> rectangular_closure(const RowSets& rows, std::size_t cap) {
    double total = 1.0;
    for (const auto& rs : rows)
        total *= static_cast<double>(rs.size());
    if (total > static_cast<double>(cap))
        throw ArgumentError("rectangular_closure: too many matrices");
    std::vector<Matrix> out;
    std::vector<std::size_t> pick(rows.size(), 0);
    while (true) {
        Matrix m;
        for (std::size_t x = 0; x < rows.size(); ++x)
            m.push_back(rows[x][pick[x]]);
        out.push_back(std::move(m));
        std::size_t x = 0;
        for (; x < rows.size(); ++x) {
            if (++pick[x] < rows[x].size())
                break;
            pick[x] = 0;
        }
        if (x == rows.size())
            break;
    }
    return out;
}

StateSpace pair_space(const StateSpace& s, const StateSpace& t) {
    std::vector<std::string> labels;
    labels.reserve(s.size() * t.size());
    for (std::size_t x = 0; x < s.size(); ++x)
        for (std::size_t y = 0; y < t.size(); ++y)
            labels.push_back(s.label(x) + "," + t.label(y));
    return StateSpace(std::move(labels));
}

NonlinearKernel lift_parameter(const NonlinearKernel& k, const StateSpace& aux) {
    const std::size_t ns = k.domain().size(), nt = aux.size();
    if (ns * nt > kProductCap)
        throw ArgumentError("lift_parameter: lifted space exceeds the desk-scale cap");
    const auto lifted = pair_space(k.domain(), aux);
    if (const auto& rows = k.rows()) {
        RowSets lr(ns * nt);
        for (std::size_t x = 0; x < ns; ++x)
            for (std::size_t y = 0; y < nt; ++y)
                for (const auto& r : (*rows)[x]) {
                    Row w(ns * nt, 0.0);
                    for (std::size_t z = 0; z < ns; ++z)
                        w[z * nt + y] = r[z];
                    lr[x * nt + y].push_back(std::move(w));
                }
        return NonlinearKernel::from_rows(lifted, std::move(lr));
    }
    return NonlinearKernel::from_evaluator(
        lifted,
        [k, ns, nt](std::span<const double> f) {
            std::vector<double> out(ns * nt), slice(ns);
            for (std::size_t y = 0; y < nt; ++y) {
                for (std::size_t z = 0; z < ns; ++z)
                    slice[z] = f[z * nt + y];
                const auto v = k.apply(slice);
                for (std::size_t x = 0; x < ns; ++x)
                    out[x * nt + y] = v[x];
            }
            return out;
        },
        "lift of " + k.description());
}

const char* to_string(OperatorForm f) noexcept {
    switch (f) {
    case OperatorForm::sublinear:
        return "sublinear";
    case OperatorForm::convex:
        return "convex";
    case OperatorForm::entropic:
        return "entropic";
    }
    return "?";
}

namespace {

NonlinearKernel build_kernel(const StateSpace& space, OperatorForm form, const std::vector<Matrix>& mats,
                             const std::vector<double>& pen, double theta) {
    const std::size_t n = space.size();
    std::vector<ExpectationModel> models;
    for (std::size_t x = 0; x < n; ++x) {
        if (form == OperatorForm::entropic) {
            models.emplace_back(EntropicModel(Scenario(space, mats.front()[x]), theta));
            continue;
        }
        std::vector<Scenario> sc;
        for (const auto& m : mats)
            sc.emplace_back(space, m[x]);
        if (form == OperatorForm::sublinear)
            models.emplace_back(deduplicate(PenaltyModel::sublinear(std::move(sc))));
        else
            models.emplace_back(deduplicate(PenaltyModel(std::move(sc), pen)));
    }
    return {space, std::move(models)};
}

void check_matrices(const StateSpace& space, const std::vector<Matrix>& mats) {
    if (mats.empty())
        throw ArgumentError("OneStepOperator: at least one matrix is required");
    for (const auto& m : mats) {
        if (m.size() != space.size())
            throw DimensionError("OneStepOperator: matrix must be |S| x |S|");
        for (const auto& r : m)
            require_stochastic(r, space.size(), "OneStepOperator");
    }
}

} // namespace

OneStepOperator::OneStepOperator(StateSpace space, OperatorForm form, std::vector<Matrix> matrices,
                                 std::vector<double> penalties, double theta)
    : space_(std::move(space)), form_(form), matrices_(std::move(matrices)), penalties_(std::move(penalties)),
      theta_(theta), kernel_(build_kernel(space_, form_, matrices_, penalties_, theta_)) {}

OneStepOperator OneStepOperator::linear(StateSpace space, Matrix p) { return sublinear(std::move(space), {std::move(p)}); }

OneStepOperator OneStepOperator::sublinear(StateSpace space, std::vector<Matrix> matrices) {
    check_matrices(space, matrices);
    std::vector<double> pen(matrices.size(), 0.0);
    return {std::move(space), OperatorForm::sublinear, std::move(matrices), std::move(pen), 0.0};
}

OneStepOperator OneStepOperator::convex(StateSpace space, std::vector<Matrix> matrices, std::vector<double> penalties) {
    check_matrices(space, matrices);
    if (penalties.size() != matrices.size())
        throw DimensionError("OneStepOperator: one penalty per matrix is required");
    return {std::move(space), OperatorForm::convex, std::move(matrices), std::move(penalties), 0.0};
}

OneStepOperator OneStepOperator::entropic(StateSpace space, Matrix reference, double theta) {
    check_matrices(space, {reference});
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw DomainError("OneStepOperator: theta must be positive");
    return {std::move(space), OperatorForm::entropic, {std::move(reference)}, {0.0}, theta};
}

bool OneStepOperator::is_linear() const noexcept {
    if (form_ != OperatorForm::sublinear)
        return false;
    for (const auto& m : matrices_)
        for (std::size_t x = 0; x < m.size(); ++x)
            if (canonical_key(m[x]) != canonical_key(matrices_.front()[x]))
                return false;
    return true;
}

RowSets OneStepOperator::row_sets() const {
    if (form_ != OperatorForm::sublinear)
        throw PreconditionError("OneStepOperator::row_sets: operator is not sublinear");
    return *kernel_.rows();
}

NonlinearKernel OneStepOperator::kernel() const { return kernel_; }

std::vector<double> OneStepOperator::apply(std::span<const double> f) const { return kernel_.apply(f); }

std::vector<double> OneStepOperator::power_apply(std::span<const double> f, std::size_t k) const {
    std::vector<double> g(f.begin(), f.end());
    require_length(g, space_.size(), "power_apply");
    for (std::size_t i = 0; i < k; ++i)
        g = kernel_.apply(g);
    return g;
}

std::vector<AxiomReport> OneStepOperator::verify(std::size_t samples, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<RandomVariable> probes;
    for (std::size_t s = 0; s < std::max<std::size_t>(samples, 2); ++s) {
        std::vector<double> v(space_.size());
        for (auto& x : v)
            x = u(rng);
        probes.emplace_back(space_, std::move(v));
    }
    std::vector<AxiomReport> out;
    for (std::size_t x = 0; x < space_.size(); ++x)
        out.push_back(verify_axioms(kernel_.state_model(x), probes));
    return out;
}

bool OneStepOperator::passes_verification(std::size_t samples, std::uint64_t seed) const {
    for (const auto& r : verify(samples, seed))
        if (!r.convex_expectation())
            return false;
    return true;
}

KernelFamily::KernelFamily(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2)
        throw ArgumentError("KernelFamily: at least two times are required");
    for (std::size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw ArgumentError("KernelFamily: times must be strictly increasing");
}

KernelFamily KernelFamily::powers(const OneStepOperator& op, std::size_t horizon) {
    if (horizon < 1)
        throw ArgumentError("KernelFamily::powers: horizon must be at least 1");
    std::vector<double> times(horizon + 1);
    for (std::size_t i = 0; i <= horizon; ++i)
        times[i] = static_cast<double>(i);
    KernelFamily fam(times);
    std::vector<NonlinearKernel> pw{op.kernel()};
    for (std::size_t g = 2; g <= horizon; ++g)
        pw.push_back(compose(op.kernel(), pw.back()));
    for (std::size_t s = 0; s <= horizon; ++s)
        for (std::size_t t = s + 1; t <= horizon; ++t)
            fam.set(times[s], times[t], pw[t - s - 1]);
    return fam;
}

void KernelFamily::set(double s, double t, NonlinearKernel k) {
    if (!(s < t))
        throw ArgumentError("KernelFamily: kernels need s < t");
    if (!kernels_.empty() && !(kernels_.begin()->second.domain() == k.domain()))
        throw DimensionError("KernelFamily: kernels must share one domain");
    kernels_.insert_or_assign({s, t}, std::move(k));
}

bool KernelFamily::has(double s, double t) const { return kernels_.count({s, t}) > 0; }

const NonlinearKernel& KernelFamily::get(double s, double t) const {
    const auto it = kernels_.find({s, t});
    if (it == kernels_.end()) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "KernelFamily: no kernel for (%g, %g)", s, t);
        throw ArgumentError(buf);
    }
    return it->second;
}

bool ChapmanReport::pass() const noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const ChapmanRow& r) { return r.pass; });
}

const ChapmanRow* ChapmanReport::first_failure() const noexcept {
    for (const auto& r : rows)
        if (!r.pass)
            return &r;
    return nullptr;
}

std::string ChapmanReport::to_csv() const {
    std::string out = "schema,s,t,u,max_discrepancy,pass\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "v1,%.17g,%.17g,%.17g,%.17g,%s\n", r.s, r.t, r.u, r.max_discrepancy,
                      r.pass ? "true" : "false");
        out += buf;
    }
    return out;
}

std::vector<TimeTriple> all_triples(const KernelFamily& fam) {
    const auto& t = fam.times();
    std::vector<TimeTriple> out;
    for (std::size_t a = 0; a < t.size(); ++a)
        for (std::size_t b = a + 1; b < t.size(); ++b)
            for (std::size_t c = b + 1; c < t.size(); ++c)
                out.push_back({t[a], t[b], t[c]});
    return out;
}

ChapmanReport chapman_check(const KernelFamily& fam, const std::vector<TimeTriple>& triples, std::size_t probes,
                            std::uint64_t seed, double tol) {
    ChapmanReport rep;
    rep.tol = tol;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& tr : triples) {
        if (!(tr.s < tr.t && tr.t < tr.u))
            throw ArgumentError("chapman_check: triples need s < t < u");
        const auto& ksu = fam.get(tr.s, tr.u);
        const auto& kst = fam.get(tr.s, tr.t);
        const auto& ktu = fam.get(tr.t, tr.u);
        const std::size_t n = ksu.domain().size();
        ChapmanRow row{tr.s, tr.t, tr.u, 0.0, true, std::nullopt, std::nullopt};
        std::vector<double> f(n);
        for (std::size_t p = 0; p < probes + n; ++p) {
            if (p < n) {
                std::fill(f.begin(), f.end(), 0.0);
                f[p] = 1.0;
            } else {
                for (auto& v : f)
                    v = u(rng);
            }
            const auto direct = ksu.apply(f);
            const auto chained = kst.apply(ktu.apply(f));
            for (std::size_t x = 0; x < n; ++x) {
                const double gap = std::abs(direct[x] - chained[x]);
                if (gap > row.max_discrepancy) {
                    row.max_discrepancy = gap;
                    if (gap > tol) {
                        row.witness_state = x;
                        row.witness_f = f;
                    }
                }
            }
        }
        row.pass = row.max_discrepancy <= tol;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

} // namespace robustexp
