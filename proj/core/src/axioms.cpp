#include "robustexp/axioms.hpp"

#include "robustexp/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace robustexp {

bool AxiomReport::convex_expectation() const noexcept {
    return monotonicity.passed && constant_preserving.passed && translation.passed && lipschitz.passed &&
           convexity.passed;
}

bool AxiomReport::sublinear() const noexcept { return convex_expectation() && positive_homogeneity.passed; }

std::vector<const AxiomCheck*> AxiomReport::checks() const {
    return {&monotonicity, &constant_preserving, &translation, &lipschitz, &convexity, &positive_homogeneity};
}

namespace {

void record(AxiomCheck& c, double violation, double tol) {
    ++c.cases;
    violation = std::max(violation, 0.0);
    c.worst_violation = std::max(c.worst_violation, violation);
    if (violation > tol)
        c.passed = false;
}

std::vector<double> combine(std::span<const double> a, std::span<const double> b, double wa, double wb) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = wa * a[i] + wb * b[i];
    return out;
}

} // namespace

AxiomReport verify_axioms(const ExpectationModel& model, std::span<const RandomVariable> samples, double tol) {
    if (samples.size() < 2)
        throw ArgumentError("verify_axioms: at least two samples are required");
    for (const auto& s : samples)
        require_same_space(model.space(), s.space(), "verify_axioms");

    AxiomReport r;
    const std::size_t n = model.space().size();
    constexpr std::array kConstants{-100.0, -10.0, -2.5, -1.0, -0.5, 0.0, 0.5, 1.0, 2.5, 10.0, 100.0};
    constexpr std::array kShifts{-10.0, -1.0, -0.25, 0.25, 1.0, 10.0};
    constexpr std::array kScales{0.5, 2.0, 3.0};

    for (double a : kConstants) {
        std::vector<double> c(n, a);
        record(r.constant_preserving, std::abs(model.evaluate(c) - a), tol);
    }

    std::vector<double> values(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        values[i] = model.evaluate(samples[i].values());

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto x = samples[i].values();
        for (double a : kShifts) {
            auto y = combine(x, x, 1.0, 0.0);
            for (double& v : y)
                v += a;
            record(r.translation, std::abs(model.evaluate(y) - (values[i] + a)), tol);
        }
        for (double lam : kScales) {
            auto y = combine(x, x, lam, 0.0);
            record(r.positive_homogeneity, std::abs(model.evaluate(y) - lam * values[i]) / std::max(1.0, lam), tol);
        }
    }

    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            const auto x = samples[i].values();
            const auto y = samples[j].values();
            std::vector<double> lo(n), hi(n);
            double dist = 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                lo[s] = std::min(x[s], y[s]);
                hi[s] = std::max(x[s], y[s]);
                dist = std::max(dist, std::abs(x[s] - y[s]));
            }
            const double elo = model.evaluate(lo);
            const double ehi = model.evaluate(hi);
            record(r.monotonicity, elo - values[i], tol);
            record(r.monotonicity, elo - values[j], tol);
            record(r.monotonicity, values[i] - ehi, tol);
            record(r.monotonicity, values[j] - ehi, tol);
            record(r.lipschitz, std::abs(values[i] - values[j]) - dist, tol);
            const auto mid = combine(x, y, 0.5, 0.5);
            record(r.convexity, model.evaluate(mid) - 0.5 * (values[i] + values[j]), tol);
        }
    }
    return r;
}

} // namespace robustexp
