#include "robustexp/bar_extension.hpp"

#include "robustexp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace robustexp {

namespace {

void require_ordered(const CylinderFunction& lo, const CylinderFunction& hi, std::size_t k) {
    const auto u = subset_union(lo.j, hi.j);
    const auto a = project_function(lo.f, u);
    const auto b = project_function(hi.f, u);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (b[i] < a[i] - 1e-12)
            throw PreconditionError("bar_extension_eval: term " + std::to_string(k) + " is below its predecessor");
}

} // namespace

ExtensionResult bar_extension_eval(const MarginalFamily& family, const CylinderSequence& seq, double tol,
                                   std::size_t max_terms) {
    if (seq.direction() != Direction::increasing)
        throw ArgumentError("bar_extension_eval: sequence must be increasing");
    if (max_terms < 2)
        throw ArgumentError("bar_extension_eval: at least two terms are required");

    ExtensionResult out;
    auto& vals = out.certificate.partial_values;
    std::optional<CylinderFunction> prev;
    for (std::size_t k = 0; k < max_terms; ++k) {
        auto g = seq.term(k);
        if (!(g.f.space().base() == family.base()))
            throw PreconditionError("bar_extension_eval: term is not a cylinder function over the family's base");
        if (prev)
            require_ordered(*prev, g, k);
        vals.push_back(cylinder_eval(family, g));
        if (k > 0) {
            out.residual = std::abs(vals[k] - vals[k - 1]);
            if (out.residual < tol) {
                out.converged = true;
                break;
            }
        }
        prev = std::move(g);
    }
    out.value = vals.back();
    out.certificate.terms = vals.size();
    return out;
}

CylinderFunction gap_function(const StateSpace& base, const std::vector<std::size_t>& y) {
    FiniteSubset j(y.size());
    std::iota(j.begin(), j.end(), 0);
    const auto sp = product_space(base, j);
    std::vector<double> v(sp.size(), 1.0);
    v[index_of_tuple(y, base.size())] = 0.0;
    return {std::move(j), RandomVariable(sp, std::move(v))};
}

CylinderSequence gap_sequence(const StateSpace& base, const std::vector<std::size_t>& y) {
    std::vector<CylinderFunction> terms;
    for (std::size_t n = 1; n <= y.size(); ++n)
        terms.push_back(gap_function(base, std::vector<std::size_t>(y.begin(), y.begin() + static_cast<long>(n))));
    return CylinderSequence::from_list(Direction::increasing, std::move(terms));
}

namespace {

/// Maximal extension of 1 - 1{x = (y, y_n)} on S^{n+1} with M = functions of x_0..x_{n-1}.
double lp_hat(const StateSpace& base, const std::vector<std::size_t>& y) {
    const std::size_t n = y.size();
    FiniteSubset all(n + 1);
    std::iota(all.begin(), all.end(), 0);
    const auto sp = product_space(base, all);
    const std::size_t b = base.size();
    std::vector<RandomVariable> basis;
    std::size_t cells = 1;
    for (std::size_t i = 0; i < n; ++i)
        cells *= b;
    for (std::size_t c = 0; c < cells; ++c) {
        std::vector<double> v(sp.size(), 0.0);
        for (std::size_t i = 0; i < sp.size(); ++i)
            if (i / b == c)
                v[i] = 1.0;
        basis.emplace_back(sp, std::move(v));
    }
    auto full = y;
    full.push_back(y.empty() ? 0 : y.back());
    const ExpectationModel dirac(PenaltyModel::linear(Scenario::dirac(sp, index_of_tuple(full, b))));
    const SubspaceModel sub(std::move(basis), dirac);
    std::vector<double> f(sp.size(), 1.0);
    f[index_of_tuple(full, b)] = 0.0;
    return maximal_extension_eval(sub, RandomVariable(sp, std::move(f))).value;
}

} // namespace

GapDemoResult hat_vs_bar_gap_demo(const MarginalFamily& family, std::size_t depth, std::size_t lp_depth) {
    if (family.base().size() != 2)
        throw PreconditionError("hat_vs_bar_gap_demo: the base space must have two states");
    if (depth < 1 || depth > 16)
        throw ArgumentError("hat_vs_bar_gap_demo: depth must be in [1, 16]");

    GapDemoResult out;
    FiniteSubset full(depth);
    std::iota(full.begin(), full.end(), 0);
    const auto* pm = family.penalty_entry(full).scenarios().size() == 1 ? &family.penalty_entry(full) : nullptr;
    if (!pm)
        throw PreconditionError("hat_vs_bar_gap_demo: family entries must be single Dirac measures");
    const auto w = pm->scenarios().front().weights();
    const auto atom = std::find(w.begin(), w.end(), 1.0);
    if (atom == w.end())
        throw PreconditionError("hat_vs_bar_gap_demo: family entries must be single Dirac measures");
    out.y = tuple_of(static_cast<std::size_t>(atom - w.begin()), 2, depth);

    out.hat_value = 1.0;
    out.bar_limit = 0.0;
    for (std::size_t n = 1; n <= depth; ++n) {
        const std::vector<std::size_t> prefix(out.y.begin(), out.y.begin() + static_cast<long>(n));
        const auto g = gap_function(family.base(), prefix);
        // Fiber sup of f over pr_J is 1 on every fiber (pigeonhole on the
        // coordinates outside J), so the least dominating element is 1.
        const CylinderFunction dominating(g.j, RandomVariable::constant(g.f.space(), 1.0));
        const double hat = cylinder_eval(family, dominating, false);
        const double bar = cylinder_eval(family, g, n <= 8);
        out.hat_by_depth.push_back(hat);
        out.bar_terms.push_back(bar);
        if (n <= lp_depth)
            out.lp_hat_by_depth.push_back(lp_hat(family.base(), prefix));
        out.hat_value = std::min(out.hat_value, hat);
    }
    out.bar_limit = out.bar_terms.back();
    return out;
}

} // namespace robustexp
