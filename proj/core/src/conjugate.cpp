#include "robustexp/conjugate.hpp"

#include "robustexp/errors.hpp"
#include "robustexp/lp.hpp"

#include <algorithm>
#include <cmath>

namespace robustexp {

namespace {

double objective(const ExpectationModel& m, std::span<const double> mu, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += mu[i] * x[i];
    return s - m.evaluate(x);
}

std::vector<std::vector<double>> start_points(std::size_t n, double r) {
    std::vector<std::vector<double>> out;
    if (n <= 6) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < n; ++i)
            total *= 3;
        for (std::size_t code = 0; code < total; ++code) {
            std::vector<double> x(n);
            std::size_t c = code;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = (static_cast<double>(c % 3) - 1.0) * r;
                c /= 3;
            }
            out.push_back(std::move(x));
        }
        return out;
    }
    out.emplace_back(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (double s : {-r, r}) {
            std::vector<double> x(n, 0.0);
            x[i] = s;
            out.push_back(std::move(x));
        }
    }
    return out;
}

ConjugateResult penalty_ball(const PenaltyModel& pm, std::span<const double> mu, double r) {
    const std::size_t n = mu.size();
    lp::LinearProgram prog(n + 1);
    std::vector<double> c(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = mu[i];
        prog.set_bounds(i, -r, r);
    }
    c[n] = -1.0;
    prog.set_free(n);
    prog.set_objective(c, true);
    for (std::size_t k = 0; k < pm.size(); ++k) {
        std::vector<double> row(n + 1);
        const auto w = pm.scenarios()[k].weights();
        for (std::size_t i = 0; i < n; ++i)
            row[i] = w[i];
        row[n] = -1.0;
        prog.add_constraint(std::move(row), lp::Sense::less_equal, pm.penalties()[k]);
    }
    const auto res = prog.solve();
    if (res.status != lp::Status::optimal)
        throw NumericError(std::string("conjugate: LP ") + lp::to_string(res.status));
    ConjugateResult out;
    out.maximizer.assign(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(n));
    out.estimate = objective(ExpectationModel(pm), mu, out.maximizer);
    return out;
}

void entropic_ascent(const EntropicModel& em, std::span<const double> mu, double r, std::vector<double>& x) {
    const std::size_t n = x.size();
    const auto p = em.reference.weights();
    const double step = 1.0 / em.theta;
    std::vector<double> q(n);
    for (int it = 0; it < 200000; ++it) {
        double mx = -lp::kInf;
        for (std::size_t i = 0; i < n; ++i)
            if (p[i] > 0.0)
                mx = std::max(mx, em.theta * x[i]);
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = p[i] > 0.0 ? p[i] * std::exp(em.theta * x[i] - mx) : 0.0;
            z += q[i];
        }
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double nx = std::clamp(x[i] + step * (mu[i] - q[i] / z), -r, r);
            moved = std::max(moved, std::abs(nx - x[i]));
            x[i] = nx;
        }
        if (moved < 1e-13)
            break;
    }
}

void coordinate_ascent(const ExpectationModel& m, std::span<const double> mu, double r, std::vector<double>& x) {
    constexpr double kGolden = 0.6180339887498949;
    double best = objective(m, mu, x);
    for (int sweep = 0; sweep < 200; ++sweep) {
        const double before = best;
        for (std::size_t i = 0; i < x.size(); ++i) {
            auto f = [&](double v) {
                const double old = x[i];
                x[i] = v;
                const double val = objective(m, mu, x);
                x[i] = old;
                return val;
            };
            double a = -r, b = r;
            double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
            double fc = f(c), fd = f(d);
            for (int k = 0; k < 100 && b - a > 1e-12 * std::max(1.0, r); ++k) {
                if (fc >= fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - kGolden * (b - a);
                    fc = f(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + kGolden * (b - a);
                    fd = f(d);
                }
            }
            for (double v : {0.5 * (a + b), -r, r}) {
                const double fv = f(v);
                if (fv > best) {
                    best = fv;
                    x[i] = v;
                }
            }
        }
        if (best - before < 1e-14)
            break;
    }
}

std::vector<std::span<const double>> generator_spans(const PenaltyModel& pm) {
    std::vector<std::span<const double>> g;
    g.reserve(pm.size());
    for (const auto& s : pm.scenarios())
        g.push_back(s.weights());
    return g;
}

} // namespace

ConjugateResult conjugate(const ExpectationModel& model, const Scenario& mu, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw ArgumentError("conjugate: radius must be positive and finite");
    require_same_space(model.space(), mu.space(), "conjugate");
    const auto w = mu.weights();

    ConjugateResult out;
    if (const auto* pm = model.penalty()) {
        out = penalty_ball(*pm, w, radius);
        out.exact = conjugate_exact(*pm, mu);
    } else {
        out.estimate = -lp::kInf;
        for (auto x : start_points(w.size(), radius)) {
            if (const auto* em = model.entropic())
                entropic_ascent(*em, w, radius, x);
            else
                coordinate_ascent(model, w, radius, x);
            const double v = objective(model, w, x);
            if (v > out.estimate) {
                out.estimate = v;
                out.maximizer = x;
            }
        }
    }
    out.radius = radius;
    return out;
}

double conjugate_exact(const PenaltyModel& pm, const Scenario& mu) {
    require_same_space(pm.space(), mu.space(), "conjugate_exact");
    const std::size_t n = mu.size();
    const std::size_t m = pm.size();
    lp::LinearProgram prog(m);
    prog.set_objective(pm.penalties());
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(m);
        for (std::size_t k = 0; k < m; ++k)
            row[k] = pm.scenarios()[k][i];
        prog.add_constraint(std::move(row), lp::Sense::equal, mu[i]);
    }
    prog.add_constraint(std::vector<double>(m, 1.0), lp::Sense::equal, 1.0);
    const auto res = prog.solve();
    if (res.status == lp::Status::infeasible)
        return lp::kInf;
    if (res.status != lp::Status::optimal)
        throw NumericError(std::string("conjugate_exact: LP ") + lp::to_string(res.status));
    return std::max(res.objective, 0.0);
}

namespace {

struct Separation {
    double gap = 0.0;
    std::vector<double> f;
};

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

/**
 * max over |f| <= 1 of point.f - max_g g.f, the L1 distance from `point` to
 * conv(generators) by LP duality. Cutting planes: the LP starts from the
 * generators extreme in each coordinate and the most violated generators
 * are added until none is violated. The returned gap is evaluated directly
 * from f, so it is always a valid lower bound on the distance.
 */
Separation separate(const std::vector<std::span<const double>>& gens, std::span<const double> point) {
    constexpr double kViolation = 1e-12;
    const std::size_t n = point.size();
    const std::size_t m = gens.size();
    std::vector<char> active(m, 0);
    std::vector<std::size_t> rows;
    auto add = [&](std::size_t k) {
        if (!active[k]) {
            active[k] = 1;
            rows.push_back(k);
        }
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t hi = 0, lo = 0;
        for (std::size_t k = 1; k < m; ++k) {
            if (gens[k][i] > gens[hi][i])
                hi = k;
            if (gens[k][i] < gens[lo][i])
                lo = k;
        }
        add(hi);
        add(lo);
    }

    Separation best{-lp::kInf, {}};
    std::vector<double> vals(m);
    std::vector<std::size_t> violated;
    while (true) {
        lp::LinearProgram prog(n + 1);
        std::vector<double> c(n + 1);
        for (std::size_t i = 0; i < n; ++i) {
            c[i] = point[i];
            prog.set_bounds(i, -1.0, 1.0);
        }
        c[n] = -1.0;
        prog.set_free(n);
        prog.set_objective(std::move(c), true);
        for (std::size_t k : rows) {
            std::vector<double> row(gens[k].begin(), gens[k].end());
            row.push_back(-1.0);
            prog.add_constraint(std::move(row), lp::Sense::less_equal, 0.0);
        }
        const auto res = prog.solve();
        if (res.status != lp::Status::optimal)
            throw NumericError(std::string("hull separation: LP ") + lp::to_string(res.status));

        const std::span<const double> f(res.x.data(), n);
        const double t = res.x[n];
        double top = -lp::kInf;
        violated.clear();
        for (std::size_t k = 0; k < m; ++k) {
            vals[k] = dot(gens[k], f);
            top = std::max(top, vals[k]);
            if (!active[k] && vals[k] > t + kViolation)
                violated.push_back(k);
        }
        const double gap = dot(point, f) - top;
        if (gap > best.gap)
            best = {gap, {f.begin(), f.end()}};
        if (violated.empty() || res.objective <= best.gap + kViolation)
            break;
        const std::size_t batch = std::min(violated.size(), std::max<std::size_t>(n, 4));
        std::partial_sort(violated.begin(), violated.begin() + static_cast<std::ptrdiff_t>(batch), violated.end(),
                          [&](std::size_t a, std::size_t b) { return vals[a] > vals[b] || (vals[a] == vals[b] && a < b); });
        for (std::size_t i = 0; i < batch; ++i)
            add(violated[i]);
    }
    return best;
}

void require_generators(const std::vector<std::span<const double>>& generators, std::span<const double> point,
                        const char* ctx) {
    if (generators.empty())
        throw ArgumentError(std::string(ctx) + ": no generators");
    for (const auto& g : generators)
        if (g.size() != point.size())
            throw DimensionError(std::string(ctx) + ": generator length mismatch");
}

} // namespace

double hull_distance(const std::vector<std::span<const double>>& generators, std::span<const double> point) {
    require_generators(generators, point, "hull_distance");
    const auto key = canonical_key(point);
    for (const auto& g : generators)
        if (canonical_key(g) == key)
            return 0.0;
    return std::max(separate(generators, point).gap, 0.0);
}

std::vector<double> hull_separator(const std::vector<std::span<const double>>& generators,
                                   std::span<const double> point, double* gap) {
    require_generators(generators, point, "hull_separator");
    auto sep = separate(generators, point);
    if (gap)
        *gap = sep.gap;
    return std::move(sep.f);
}

MembershipResult scenario_membership(const PenaltyModel& pm, const Scenario& mu, double tol) {
    if (!pm.is_sublinear())
        throw PreconditionError("scenario_membership: model has nonzero penalties");
    require_same_space(pm.space(), mu.space(), "scenario_membership");
    const auto gens = generator_spans(pm);
    MembershipResult out;
    out.distance = hull_distance(gens, mu.weights());
    out.member = out.distance <= tol;
    if (!out.member)
        out.witness = RandomVariable(mu.space(), hull_separator(gens, mu.weights()));
    return out;
}

} // namespace robustexp
