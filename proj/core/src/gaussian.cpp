#include "robustexp/gaussian.hpp"

#include "robustexp/errors.hpp"
#include "robustexp/gauss_hermite.hpp"
#include "robustexp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace robustexp {

void ParamBox::validate() const {
    for (double v : {mu_lo, mu_hi, sigma_lo, sigma_hi})
        if (!std::isfinite(v))
            throw DomainError("ParamBox: bounds must be finite");
    if (mu_lo > mu_hi)
        throw DomainError("ParamBox: mu_lo > mu_hi");
    if (!(sigma_lo > 0.0))
        throw DomainError("ParamBox: sigma_lo must be positive");
    if (sigma_lo > sigma_hi)
        throw DomainError("ParamBox: sigma_lo > sigma_hi");
}

bool ParamBox::contains(double mu, double sigma) const noexcept {
    return mu >= mu_lo && mu <= mu_hi && sigma >= sigma_lo && sigma <= sigma_hi;
}

TimeGrid::TimeGrid(std::vector<double> times, double horizon) : times_(std::move(times)), horizon_(horizon) {
    if (times_.empty() || times_.size() > 4)
        throw ArgumentError("TimeGrid: between 1 and 4 times are supported");
    if (!std::isfinite(horizon_) || horizon_ <= 0.0)
        throw DomainError("TimeGrid: horizon must be positive");
    double prev = -1.0;
    for (double t : times_) {
        if (!std::isfinite(t) || t < 0.0 || t > horizon_)
            throw DomainError("TimeGrid: times must lie in [0, T]");
        if (t <= prev)
            throw DomainError("TimeGrid: times must be strictly increasing");
        prev = t;
    }
}

std::vector<double> TimeGrid::increments() const {
    std::vector<double> d(times_.size());
    double prev = 0.0;
    for (std::size_t k = 0; k < times_.size(); ++k) {
        d[k] = times_[k] - prev;
        prev = times_[k];
    }
    return d;
}

Polynomial::Polynomial(std::size_t arity, std::vector<Monomial> terms) : arity_(arity), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
        if (t.powers.size() != arity_)
            throw DimensionError("Polynomial: monomial arity mismatch");
        if (!std::isfinite(t.coef))
            throw DomainError("Polynomial: non-finite coefficient");
    }
}

unsigned Polynomial::max_power() const noexcept {
    unsigned m = 0;
    for (const auto& t : terms_)
        for (unsigned p : t.powers)
            m = std::max(m, p);
    return m;
}

double Polynomial::operator()(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
        double v = t.coef;
        for (std::size_t i = 0; i < arity_; ++i)
            for (unsigned p = 0; p < t.powers[i]; ++p)
                v *= x[i];
        s += v;
    }
    return s;
}

PathFunction::PathFunction(std::string name, std::size_t arity, Fn fn)
    : name_(std::move(name)), arity_(arity), fn_(std::move(fn)) {
    if (arity_ == 0)
        throw ArgumentError("PathFunction: arity must be positive");
}

PathFunction PathFunction::polynomial(Polynomial p, std::string name) {
    const std::size_t n = p.arity();
    PathFunction f(std::move(name), n, [p](std::span<const double> x) { return p(x); });
    f.poly_ = std::move(p);
    return f;
}

const std::vector<std::string>& function_names() {
    static const std::vector<std::string> names{"one", "first", "last", "last_sq",
                                                "cos_last", "sum", "max", "positive_last"};
    return names;
}

PathFunction named_function(const std::string& name, std::size_t arity) {
    if (arity == 0 || arity > 4)
        throw ArgumentError("named_function: arity must be in [1, 4]");
    const auto mono = [arity](double c, std::size_t var, unsigned p) {
        Monomial m{c, std::vector<unsigned>(arity, 0)};
        if (p > 0)
            m.powers[var] = p;
        return m;
    };
    const std::size_t last = arity - 1;
    if (name == "one")
        return PathFunction::polynomial(Polynomial(arity, {mono(1.0, 0, 0)}), name);
    if (name == "first")
        return PathFunction::polynomial(Polynomial(arity, {mono(1.0, 0, 1)}), name);
    if (name == "last")
        return PathFunction::polynomial(Polynomial(arity, {mono(1.0, last, 1)}), name);
    if (name == "last_sq")
        return PathFunction::polynomial(Polynomial(arity, {mono(1.0, last, 2)}), name);
    if (name == "sum") {
        std::vector<Monomial> terms;
        for (std::size_t i = 0; i < arity; ++i)
            terms.push_back(mono(1.0, i, 1));
        return PathFunction::polynomial(Polynomial(arity, std::move(terms)), name);
    }
    if (name == "cos_last")
        return PathFunction(name, arity, [last](std::span<const double> x) { return std::cos(x[last]); });
    if (name == "max")
        return PathFunction(name, arity, [](std::span<const double> x) { return *std::max_element(x.begin(), x.end()); });
    if (name == "positive_last")
        return PathFunction(name, arity, [last](std::span<const double> x) { return std::max(x[last], 0.0); });
    throw ArgumentError("named_function: unknown function '" + name + "'");
}

PathFunction extend_to(const PathFunction& f, const std::vector<double>& j, const std::vector<double>& k) {
    if (f.arity() != k.size())
        throw DimensionError("extend_to: function arity does not match K");
    std::vector<std::size_t> pos;
    for (double t : k) {
        const auto it = std::find(j.begin(), j.end(), t);
        if (it == j.end())
            throw ArgumentError("extend_to: K is not a subset of J");
        pos.push_back(static_cast<std::size_t>(it - j.begin()));
    }
    const std::string name = f.name() + " o pr";
    if (f.poly()) {
        std::vector<Monomial> terms;
        for (const auto& m : f.poly()->terms()) {
            Monomial e{m.coef, std::vector<unsigned>(j.size(), 0)};
            for (std::size_t i = 0; i < pos.size(); ++i)
                e.powers[pos[i]] += m.powers[i];
            terms.push_back(std::move(e));
        }
        return PathFunction::polynomial(Polynomial(j.size(), std::move(terms)), name);
    }
    return PathFunction(name, j.size(), [f, pos](std::span<const double> x) {
        double buf[4];
        for (std::size_t i = 0; i < pos.size(); ++i)
            buf[i] = x[pos[i]];
        return f(std::span<const double>(buf, pos.size()));
    });
}

namespace {

struct Axis {
    std::vector<double> nodes;
    std::vector<double> weights;
};

double integrate(const std::vector<Axis>& axes, const PathFunction& f) {
    const std::size_t n = axes.size();
    double y[4] = {0, 0, 0, 0};
    double total = 0.0;
    // Depth-first over the tensor grid; fixed order keeps sums reproducible.
    auto rec = [&](auto&& self, std::size_t k, double prev, double w) -> void {
        const Axis& ax = axes[k];
        for (std::size_t i = 0; i < ax.nodes.size(); ++i) {
            y[k] = prev + ax.nodes[i];
            const double wi = w * ax.weights[i];
            if (k + 1 == n) {
                const double v = f(std::span<const double>(y, n));
                if (!std::isfinite(v))
                    throw DomainError("linear_eval: non-finite function value at a quadrature node");
                total += wi * v;
            } else {
                self(self, k + 1, y[k], wi);
            }
        }
    };
    rec(rec, 0, 0.0, 1.0);
    return total;
}

std::vector<Axis> make_axes(const std::vector<double>& dt, std::span<const double> mu, std::span<const double> sigma,
                            const QuadratureRule& rule) {
    std::vector<Axis> axes(dt.size());
    for (std::size_t k = 0; k < dt.size(); ++k) {
        const double mean = mu[k] * dt[k];
        const double sd = sigma[k] * std::sqrt(dt[k]);
        if (sd == 0.0) {
            axes[k].nodes = {mean};
            axes[k].weights = {1.0};
            continue;
        }
        axes[k].nodes.resize(rule.nodes.size());
        axes[k].weights = rule.weights;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            axes[k].nodes[i] = mean + sd * rule.nodes[i];
    }
    return axes;
}

} // namespace

double linear_eval(const TimeGrid& grid, const PathFunction& f, std::span<const double> mu,
                   std::span<const double> sigma, std::size_t order) {
    const std::size_t n = grid.size();
    if (f.arity() != n)
        throw DimensionError("linear_eval: function arity does not match the time grid");
    if (mu.size() != n || sigma.size() != n)
        throw DimensionError("linear_eval: one (mu, sigma) per increment is required");
    for (std::size_t k = 0; k < n; ++k)
        if (!std::isfinite(mu[k]) || !std::isfinite(sigma[k]) || sigma[k] < 0.0)
            throw DomainError("linear_eval: parameters must be finite with sigma >= 0");
    return integrate(make_axes(grid.increments(), mu, sigma, gauss_hermite(order)), f);
}

namespace {

class Objective {
  public:
    Objective(const TimeGrid& grid, const PathFunction& f, std::size_t order)
        : dt_(grid.increments()), f_(f), rule_(gauss_hermite(order)) {}

    double operator()(const std::vector<double>& theta) const {
        const std::size_t n = dt_.size();
        const std::span<const double> all(theta);
        return integrate(make_axes(dt_, all.first(n), all.subspan(n, n), rule_), f_);
    }

  private:
    std::vector<double> dt_;
    const PathFunction& f_;
    const QuadratureRule& rule_;
};

struct Refined {
    std::vector<double> theta;
    double value;
    std::size_t evaluations;
};

/// Coordinate ascent with golden-section line searches on +-step brackets.
Refined refine(const Objective& obj, std::vector<double> theta, double value, const std::vector<double>& lo,
               const std::vector<double>& hi, const std::vector<double>& step) {
    constexpr double kGolden = 0.6180339887498949;
    std::size_t evals = 0;
    auto eval_at = [&](std::size_t c, double x) {
        auto t = theta;
        t[c] = x;
        ++evals;
        return obj(t);
    };
    for (int sweep = 0; sweep < 30; ++sweep) {
        bool improved = false;
        for (std::size_t c = 0; c < theta.size(); ++c) {
            if (step[c] == 0.0)
                continue;
            double a = std::max(lo[c], theta[c] - step[c]);
            double b = std::min(hi[c], theta[c] + step[c]);
            const double a0 = a, b0 = b;
            double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
            double f1 = eval_at(c, x1), f2 = eval_at(c, x2);
            for (int it = 0; it < 40; ++it) {
                if (f1 >= f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - kGolden * (b - a);
                    f1 = eval_at(c, x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + kGolden * (b - a);
                    f2 = eval_at(c, x2);
                }
            }
            double best_x = f1 >= f2 ? x1 : x2;
            double best_v = std::max(f1, f2);
            for (double x : {a0, b0}) {
                const double v = eval_at(c, x);
                if (v > best_v) {
                    best_v = v;
                    best_x = x;
                }
            }
            if (best_v > value) {
                improved = improved || best_v - value > 1e-15 * std::max(1.0, std::abs(value));
                value = best_v;
                theta[c] = best_x;
            }
        }
        if (!improved)
            break;
    }
    return {std::move(theta), value, evals};
}

} // namespace

RobustResult robust_eval(const TimeGrid& grid, const PathFunction& f, const ParamBox& box,
                         const RobustOptions& options) {
    box.validate();
    const std::size_t n = grid.size();
    if (f.arity() != n)
        throw DimensionError("robust_eval: function arity does not match the time grid");
    if (options.grid_per_axis < 2)
        throw ArgumentError("robust_eval: grid_per_axis must be at least 2");
    const Objective obj(grid, f, options.order);

    // theta = (mu_1..mu_n, sigma_1..sigma_n); a degenerate axis has one point.
    std::vector<double> lo(2 * n), hi(2 * n), step(2 * n);
    std::vector<std::size_t> count(2 * n);
    for (std::size_t c = 0; c < 2 * n; ++c) {
        lo[c] = c < n ? box.mu_lo : box.sigma_lo;
        hi[c] = c < n ? box.mu_hi : box.sigma_hi;
        count[c] = hi[c] > lo[c] ? options.grid_per_axis : 1;
        step[c] = count[c] > 1 ? (hi[c] - lo[c]) / static_cast<double>(count[c] - 1) : 0.0;
    }
    double points = 1.0;
    for (std::size_t c : count)
        points *= static_cast<double>(c);
    const double work = points * std::pow(static_cast<double>(options.order), static_cast<double>(n));
    if (work > kGaussianCap)
        throw ArgumentError("robust_eval: grid and order exceed the desk-scale cap");
    const auto total = static_cast<std::size_t>(points);

    auto point = [&](std::size_t idx) {
        std::vector<double> theta(2 * n);
        for (std::size_t c = 2 * n; c-- > 0;) {
            const std::size_t i = idx % count[c];
            idx /= count[c];
            theta[c] = i + 1 == count[c] ? hi[c] : lo[c] + step[c] * static_cast<double>(i);
        }
        return theta;
    };

    constexpr std::size_t kChunk = 1024;
    std::vector<double> vals;
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t start = 0; start < total; start += kChunk) {
        const std::size_t len = std::min(kChunk, total - start);
        vals.assign(len, 0.0);
        parallel_for(len, [&](std::size_t i) { vals[i] = obj(point(start + i)); });
        for (std::size_t i = 0; i < len; ++i)
            if (vals[i] > best_v) {
                best_v = vals[i];
                best = start + i;
            }
    }

    RobustResult out;
    out.grid_value = best_v;
    out.evaluations = total;
    auto theta = point(best);
    const auto ref = refine(obj, theta, best_v, lo, hi, step);
    out.evaluations += ref.evaluations;
    out.grid_error = ref.value - best_v;
    if (options.refine) {
        theta = ref.theta;
        out.value = ref.value;
    } else {
        out.value = best_v;
    }
    out.mu.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(n));
    out.sigma.assign(theta.begin() + static_cast<std::ptrdiff_t>(n), theta.end());
    const std::size_t fine = std::min<std::size_t>(2 * options.order, 200);
    out.quadrature_error = std::abs(linear_eval(grid, f, out.mu, out.sigma, fine) - out.value);
    return out;
}

GaussianFamily::GaussianFamily(ParamBox box, double horizon, RobustOptions options)
    : box_(box), horizon_(horizon), options_(options) {
    box_.validate();
    if (!std::isfinite(horizon_) || horizon_ <= 0.0)
        throw DomainError("GaussianFamily: horizon must be positive");
    if (options_.grid_per_axis < 2)
        throw ArgumentError("GaussianFamily: grid_per_axis must be at least 2");
}

RobustResult GaussianFamily::evaluate(const std::vector<double>& times, const PathFunction& f) const {
    return robust_eval(TimeGrid(times, horizon_), f, box_, options_);
}

GaussianFamily gaussian_marginal_family(const ParamBox& box, double horizon, std::size_t order,
                                        std::size_t grid_per_axis, bool refine) {
    return GaussianFamily(box, horizon, RobustOptions{order, grid_per_axis, refine});
}

GaussianConsistency check_gaussian_consistency(const GaussianFamily& family, const std::vector<double>& j,
                                               const std::vector<double>& k, const PathFunction& f, double tol) {
    if (k.empty() || k.size() >= j.size())
        throw ArgumentError("check_gaussian_consistency: K must be a nonempty proper subset of J");
    GaussianConsistency out;
    out.j = j;
    out.k = k;
    const auto rk = family.evaluate(k, f);
    const auto rj = family.evaluate(j, extend_to(f, j, k));
    out.value_k = rk.value;
    out.value_j = rj.value;
    out.discrepancy = std::abs(rk.value - rj.value);
    out.quadrature_error = std::max(rk.quadrature_error, rj.quadrature_error);
    out.grid_error = std::max(rk.grid_error, rj.grid_error);
    out.pass = out.discrepancy <= tol;
    return out;
}

std::vector<Scenario> gaussian_grid_scenarios(const ParamBox& box, double t, std::size_t order,
                                              std::size_t grid_per_axis, double lo, double hi, std::size_t points) {
    box.validate();
    if (!(hi > lo) || points < 2)
        throw ArgumentError("gaussian_grid_scenarios: need lo < hi and at least 2 points");
    if (grid_per_axis < 2)
        throw ArgumentError("gaussian_grid_scenarios: grid_per_axis must be at least 2");
    if (!std::isfinite(t) || t < 0.0)
        throw DomainError("gaussian_grid_scenarios: time must be nonnegative");
    const auto space = StateSpace::indexed(points);
    const auto& rule = gauss_hermite(order);
    const double h = (hi - lo) / static_cast<double>(points - 1);
    std::vector<Scenario> out;
    for (std::size_t a = 0; a < grid_per_axis; ++a) {
        const double mu = box.mu_lo + (box.mu_hi - box.mu_lo) * static_cast<double>(a) /
                                          static_cast<double>(grid_per_axis - 1);
        for (std::size_t b = 0; b < grid_per_axis; ++b) {
            const double sigma = box.sigma_lo + (box.sigma_hi - box.sigma_lo) * static_cast<double>(b) /
                                                    static_cast<double>(grid_per_axis - 1);
            std::vector<double> w(points, 0.0);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double x = mu * t + sigma * std::sqrt(t) * rule.nodes[i];
                const double pos = std::round((x - lo) / h);
                const auto idx = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(points - 1)));
                w[idx] += rule.weights[i];
            }
            out.emplace_back(space, std::move(w));
        }
    }
    return out;
}

} // namespace robustexp
