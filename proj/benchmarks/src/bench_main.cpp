#include <benchmark/benchmark.h>

#include "robustexp/conjugate.hpp"
#include "robustexp/expectation.hpp"
#include "robustexp/gaussian.hpp"
#include "robustexp/kernel.hpp"
#include "robustexp/markov_chain.hpp"

#include <random>

using namespace robustexp;

namespace {

std::vector<double> simplex_point(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(n);
    double s = 0.0;
    for (auto& v : w)
        s += v = e(rng);
    for (auto& v : w)
        v /= s;
    return w;
}

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x)
        v = u(rng);
    return x;
}

PenaltyModel random_model(std::mt19937_64& rng, std::size_t n, std::size_t m) {
    const auto sp = StateSpace::indexed(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Scenario> sc;
    std::vector<double> pen;
    for (std::size_t k = 0; k < m; ++k) {
        sc.emplace_back(sp, simplex_point(rng, n));
        pen.push_back(k == 0 ? 0.0 : u(rng));
    }
    return {std::move(sc), std::move(pen)};
}

} // namespace

static void BM_DualEval(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto pm = random_model(rng, n, static_cast<std::size_t>(state.range(1)));
    const auto x = random_values(rng, n);
    for (auto _ : state)
        benchmark::DoNotOptimize(dual_eval(pm, std::span<const double>(x)));
}
BENCHMARK(BM_DualEval)->Args({8, 16})->Args({64, 64})->Args({256, 256});

static void BM_MarkovEval(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const std::size_t n = 3;
    const auto sp = StateSpace::indexed(n);
    std::vector<Matrix> mats(2, Matrix(n));
    for (auto& p : mats)
        for (auto& row : p)
            row = simplex_point(rng, n);
    const auto op = OneStepOperator::sublinear(sp, mats);
    const ExpectationModel mu0(PenaltyModel::linear(Scenario::uniform(sp)));
    FiniteSubset j;
    for (std::size_t t = 1; t <= static_cast<std::size_t>(state.range(0)); ++t)
        j.push_back(t);
    std::size_t size = 1;
    for (std::size_t i = 0; i < j.size(); ++i)
        size *= n;
    const auto f = random_values(rng, size);
    for (auto _ : state)
        benchmark::DoNotOptimize(markov_eval(op, mu0, j, f));
}
BENCHMARK(BM_MarkovEval)->DenseRange(2, 8, 2);

static void BM_HullDistance(benchmark::State& state) {
    std::mt19937_64 rng(3);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<std::vector<double>> gens;
    for (int k = 0; k < state.range(1); ++k)
        gens.push_back(simplex_point(rng, n));
    std::vector<std::span<const double>> views(gens.begin(), gens.end());
    const auto point = simplex_point(rng, n);
    for (auto _ : state)
        benchmark::DoNotOptimize(hull_distance(views, point));
}
BENCHMARK(BM_HullDistance)->Args({4, 64})->Args({16, 1024})->Args({64, 4096});

static void BM_RobustEval(benchmark::State& state) {
    const auto times = static_cast<std::size_t>(state.range(0));
    std::vector<double> t;
    for (std::size_t i = 1; i <= times; ++i)
        t.push_back(static_cast<double>(i) / static_cast<double>(times));
    const TimeGrid grid(t, 1.0);
    const auto f = named_function("cos_last", times);
    const ParamBox box{-0.5, 0.5, 0.5, 1.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(robust_eval(grid, f, box, RobustOptions{20, 5, true}).value);
}
BENCHMARK(BM_RobustEval)->DenseRange(1, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
