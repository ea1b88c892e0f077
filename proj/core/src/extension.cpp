#include "robustexp/extension.hpp"

#include "robustexp/errors.hpp"
#include "robustexp/lp.hpp"

#include <algorithm>
#include <cmath>

namespace robustexp {

namespace {

const PenaltyModel& require_penalty(const SubspaceModel& sub, const char* ctx) {
    const auto* pm = sub.expectation().penalty();
    if (!pm)
        throw PreconditionError(std::string(ctx) + ": expectation must be penalty-dual");
    return *pm;
}

/// mu_k . b_j for every scenario k and basis vector j.
std::vector<std::vector<double>> restricted_scenarios(const SubspaceModel& sub, const PenaltyModel& pm) {
    std::vector<std::vector<double>> out(pm.size(), std::vector<double>(sub.dimension()));
    for (std::size_t k = 0; k < pm.size(); ++k)
        for (std::size_t j = 0; j < sub.dimension(); ++j)
            out[k][j] = pm.scenarios()[k].expect(sub.basis()[j].values());
    return out;
}

double dominance_violation(const SubspaceModel& sub, std::span<const double> c, std::span<const double> x,
                           bool above) {
    const auto v = sub.combine(c);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, above ? x[i] - v[i] : v[i] - x[i]);
    return worst;
}

} // namespace

ExtensionResult maximal_extension_eval(const SubspaceModel& sub, const RandomVariable& x, double lp_tol) {
    require_same_space(sub.space(), x.space(), "maximal_extension_eval");
    const auto& pm = require_penalty(sub, "maximal_extension_eval");
    const auto mb = restricted_scenarios(sub, pm);
    const std::size_t d = sub.dimension();
    const std::size_t n = x.size();

    lp::LinearProgram prog(d + 1);
    for (std::size_t j = 0; j <= d; ++j)
        prog.set_free(j);
    std::vector<double> obj(d + 1, 0.0);
    obj[d] = 1.0;
    prog.set_objective(std::move(obj));
    for (std::size_t k = 0; k < pm.size(); ++k) {
        std::vector<double> row = mb[k];
        row.push_back(-1.0);
        prog.add_constraint(std::move(row), lp::Sense::less_equal, pm.penalties()[k]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(d + 1, 0.0);
        for (std::size_t j = 0; j < d; ++j)
            row[j] = sub.basis()[j][i];
        prog.add_constraint(std::move(row), lp::Sense::greater_equal, x[i]);
    }
    const auto res = prog.solve(lp_tol);
    if (res.status != lp::Status::optimal)
        throw NumericError(std::string("maximal_extension_eval: LP ") + lp::to_string(res.status));

    ExtensionResult out;
    out.certificate.coefficients.assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(d));
    out.value = res.objective;
    out.residual = dominance_violation(sub, out.certificate.coefficients, x.values(), true);
    out.converged = out.residual <= lp_tol;
    return out;
}

ExtensionResult minimal_extension_eval(const SubspaceModel& sub, const RandomVariable& x, double lp_tol) {
    require_same_space(sub.space(), x.space(), "minimal_extension_eval");
    const auto& pm = require_penalty(sub, "minimal_extension_eval");
    const auto mb = restricted_scenarios(sub, pm);
    const std::size_t d = sub.dimension();
    const std::size_t n = x.size();

    ExtensionResult out;
    out.value = -lp::kInf;
    for (std::size_t k = 0; k < pm.size(); ++k) {
        lp::LinearProgram prog(d);
        for (std::size_t j = 0; j < d; ++j)
            prog.set_free(j);
        prog.set_objective(mb[k], true);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> row(d);
            for (std::size_t j = 0; j < d; ++j)
                row[j] = sub.basis()[j][i];
            prog.add_constraint(std::move(row), lp::Sense::less_equal, x[i]);
        }
        const auto res = prog.solve(lp_tol);
        if (res.status != lp::Status::optimal)
            throw NumericError(std::string("minimal_extension_eval: LP ") + lp::to_string(res.status));
        const double v = res.objective - pm.penalties()[k];
        if (v > out.value) {
            out.value = v;
            out.certificate.scenario = k;
            out.certificate.coefficients = res.x;
        }
    }
    out.residual = dominance_violation(sub, out.certificate.coefficients, x.values(), false);
    out.converged = out.residual <= lp_tol;
    return out;
}

ExtensionResult delta_extension_eval(const SubspaceModel& sub, const RVSequence& seq, double tol,
                                     std::size_t max_terms) {
    if (seq.direction() != Direction::decreasing)
        throw ArgumentError("delta_extension_eval: sequence must be decreasing");
    if (max_terms < 2)
        throw ArgumentError("delta_extension_eval: at least two terms are required");
    if (!(tol > 0.0))
        throw ArgumentError("delta_extension_eval: tolerance must be positive");

    ExtensionResult out;
    auto& vals = out.certificate.partial_values;
    for (std::size_t k = 0; k < max_terms; ++k) {
        const auto x = seq.term(k);
        require_same_space(sub.space(), x.space(), "delta_extension_eval");
        if (sub.projection_residual(x.values()) > 1e-9)
            throw PreconditionError("delta_extension_eval: term " + std::to_string(k) + " lies outside the subspace");
        vals.push_back(sub.expectation().evaluate(x));
        if (k > 0) {
            if (vals[k] > vals[k - 1] + 1e-12)
                throw PreconditionError("delta_extension_eval: values increase; sequence is not decreasing");
            out.residual = vals[k - 1] - vals[k];
            if (out.residual < tol) {
                out.converged = true;
                break;
            }
        }
    }
    out.value = vals.back();
    out.certificate.terms = vals.size();
    return out;
}

bool is_monotone(const RVSequence& seq, std::size_t terms, double tol) {
    const bool up = seq.direction() == Direction::increasing;
    std::optional<RandomVariable> prev;
    for (std::size_t k = 0; k < terms; ++k) {
        auto cur = seq.term(k);
        if (prev) {
            require_same_space(prev->space(), cur.space(), "is_monotone");
            for (std::size_t i = 0; i < cur.size(); ++i) {
                const double step = up ? cur[i] - (*prev)[i] : (*prev)[i] - cur[i];
                if (step < -tol)
                    return false;
            }
        }
        if (seq.limit()) {
            const auto& lim = *seq.limit();
            require_same_space(lim.space(), cur.space(), "is_monotone");
            for (std::size_t i = 0; i < cur.size(); ++i) {
                const double gap = up ? lim[i] - cur[i] : cur[i] - lim[i];
                if (gap < -tol)
                    return false;
            }
        }
        prev = std::move(cur);
    }
    return true;
}

} // namespace robustexp
