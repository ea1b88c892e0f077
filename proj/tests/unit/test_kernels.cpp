#include "doctest.h"

#include "markov_oracles.hpp"

#include "robustexp/consistency.hpp"
#include "robustexp/errors.hpp"
#include "robustexp/markov_chain.hpp"

#include <cmath>
#include <random>

using namespace robustexp;

namespace {

const StateSpace& two() {
    static const StateSpace s({"0", "1"});
    return s;
}

std::vector<FiniteSubset> subsets_up_to(Index horizon) {
    std::vector<FiniteSubset> out;
    const int n = horizon + 1;
    for (int mask = 1; mask < (1 << n); ++mask) {
        FiniteSubset j;
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i))
                j.push_back(i);
        out.push_back(j);
    }
    return out;
}

ExpectationModel initial_model(const StateSpace& s, const std::vector<oracle::Vec>& dists) {
    std::vector<Scenario> sc;
    for (const auto& d : dists)
        sc.emplace_back(s, d);
    return ExpectationModel(PenaltyModel::sublinear(std::move(sc)));
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

NonlinearKernel random_row_kernel(std::mt19937_64& rng, const StateSpace& s, std::size_t rows_per_state) {
    RowSets r(s.size());
    for (auto& at : r)
        for (std::size_t k = 0; k < rows_per_state; ++k)
            at.push_back(oracle::random_simplex(rng, s.size()));
    return NonlinearKernel::from_rows(s, r);
}

} // namespace

TEST_CASE("kernel application on rows") {
    const auto k = NonlinearKernel::from_rows(two(), {{{1.0, 0.0}, {0.0, 1.0}}, {{0.5, 0.5}}});
    const auto g = k.apply(std::vector<double>{2.0, 0.0});
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kernel_apply(k, RandomVariable(two(), {2.0, 0.0})).values()[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(k.apply(std::vector<double>{1.0, 2.0, 3.0}), DimensionError);
}

TEST_CASE("kernel on the last axis of a product function") {
    const auto k = NonlinearKernel::from_rows(two(), {{{1.0, 0.0}, {0.0, 1.0}}, {{0.5, 0.5}}});
    const auto sp = product_space(two(), {0, 1});
    // f(x0, x1): rows x0 = 0 -> (2, 0), x0 = 1 -> (4, 6)
    const RandomVariable f(sp, {2.0, 0.0, 4.0, 6.0});
    const auto g = kernel_apply_last(k, f);
    REQUIRE(g.size() == 2);
    CHECK(g.values()[0] == doctest::Approx(2.0));
    CHECK(g.values()[1] == doctest::Approx(5.0));
}

TEST_CASE("composition") {
    std::mt19937_64 rng(21);
    const StateSpace s3({"a", "b", "c"});
    const auto k0 = random_row_kernel(rng, s3, 2);
    const auto k1 = random_row_kernel(rng, s3, 3);
    const auto k2 = random_row_kernel(rng, s3, 2);
    const auto id = NonlinearKernel::identity(s3);
    const auto left = compose(compose(k0, k1), k2);
    const auto right = compose(k0, compose(k1, k2));
    const auto closure = product_closure(*k0.rows(), *k1.rows());
    for (int trial = 0; trial < 50; ++trial) {
        const auto f = oracle::random_vector(rng, 3, -5.0, 5.0);
        CHECK(max_abs_diff(compose(k0, id).apply(f), k0.apply(f)) == 0.0);
        CHECK(max_abs_diff(compose(id, k0).apply(f), k0.apply(f)) == 0.0);
        CHECK(max_abs_diff(left.apply(f), right.apply(f)) <= 1e-12);

        // k0 k1 as a max over rectangular products of rows
        const auto direct = compose(k0, k1).apply(f);
        for (std::size_t x = 0; x < 3; ++x) {
            double best = -1e300;
            for (const auto& a : (*k0.rows())[x])
                for (const auto& m : rectangular_closure(*k1.rows())) {
                    double v = 0.0;
                    for (std::size_t y = 0; y < 3; ++y)
                        v += a[y] * oracle::dot(m[y], f);
                    best = std::max(best, v);
                }
            CHECK(std::abs(direct[x] - best) <= 1e-12);
            double via_closure = -1e300;
            for (const auto& r : closure[x])
                via_closure = std::max(via_closure, oracle::dot(r, f));
            CHECK(std::abs(direct[x] - via_closure) <= 1e-12);
        }
    }
    CHECK(rectangular_closure(*k1.rows()).size() == 27);
    CHECK_THROWS_AS(product_closure(*k1.rows(), *k1.rows(), 5), ArgumentError);
}

TEST_CASE("parameter lifting") {
    std::mt19937_64 rng(5);
    const auto k = random_row_kernel(rng, two(), 2);
    const StateSpace t({"u", "v", "w"});
    const auto lifted = lift_parameter(k, t);
    REQUIRE(lifted.domain().size() == 6);
    CHECK(lifted.domain().label(3) == "1,u");
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = oracle::random_vector(rng, 6);
        const auto out = lifted.apply(f);
        for (std::size_t y = 0; y < 3; ++y) {
            const std::vector<double> slice{f[0 * 3 + y], f[1 * 3 + y]};
            const auto ref = k.apply(slice);
            for (std::size_t x = 0; x < 2; ++x)
                CHECK(std::abs(out[x * 3 + y] - ref[x]) <= 1e-14);
        }
    }
    // constant preserving, monotone on the lifted space
    const auto c = lifted.apply(std::vector<double>(6, 2.5));
    for (double v : c)
        CHECK(std::abs(v - 2.5) <= 1e-14);
}

TEST_CASE("operator construction and verification") {
    CHECK_THROWS_AS(OneStepOperator::linear(two(), {{0.5, 0.6}, {1.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(OneStepOperator::linear(two(), {{1.0, 0.0}}), DimensionError);
    CHECK_THROWS_AS(OneStepOperator::convex(two(), {{{1, 0}, {0, 1}}}, {0.5}), DomainError);
    CHECK_THROWS_AS(OneStepOperator::entropic(two(), {{1, 0}, {0, 1}}, 0.0), DomainError);

    const auto op = OneStepOperator::convex(two(), {{{1, 0}, {0, 1}}, {{0.5, 0.5}, {0.5, 0.5}}}, {0.0, 0.2});
    CHECK(op.passes_verification());
    const auto v = op.apply(std::vector<double>{1.0, 0.0});
    CHECK(v[0] == doctest::Approx(1.0));
    CHECK(v[1] == doctest::Approx(0.3));

    const auto ent = OneStepOperator::entropic(two(), {{0.5, 0.5}, {0.2, 0.8}}, 2.0);
    const auto e = ent.apply(std::vector<double>{1.0, -1.0});
    CHECK(e[1] == doctest::Approx(0.5 * std::log(0.2 * std::exp(2.0) + 0.8 * std::exp(-2.0))));
    CHECK(ent.passes_verification());
}

TEST_CASE("chapman-kolmogorov on power families") {
    std::mt19937_64 rng(8);
    const StateSpace s3({"a", "b", "c"});
    const auto op = OneStepOperator::sublinear(
        s3, {oracle::random_stochastic(rng, 3), oracle::random_stochastic(rng, 3)});
    auto fam = KernelFamily::powers(op, 3);
    CHECK(fam.has(0, 3));
    CHECK(fam.has(1, 2));
    const auto triples = all_triples(fam);
    CHECK(triples.size() == 4);
    const auto ok = chapman_check(fam, triples, 16, 3);
    CHECK(ok.pass());
    for (const auto& row : ok.rows)
        CHECK(row.max_discrepancy <= 1e-12);

    // E_{0,2} replaced by P^2 of a perturbed operator
    auto mats = op.matrices();
    for (auto& m : mats)
        for (auto& row : m)
            for (auto& x : row)
                x = 0.9 * x + 0.1 / 3.0;
    const auto perturbed = OneStepOperator::sublinear(s3, mats);
    fam.set(0, 2, compose(perturbed.kernel(), perturbed.kernel()));
    const auto bad = chapman_check(fam, triples, 16, 3);
    CHECK_FALSE(bad.pass());
    REQUIRE(bad.first_failure() != nullptr);
    CHECK(bad.first_failure()->s == 0.0);
    CHECK(bad.first_failure()->witness_f.has_value());
    CHECK(bad.to_csv().rfind("schema,s,t,u,max_discrepancy,pass\n", 0) == 0);

    KernelFamily real({0.0, 0.5, 1.25});
    real.set(0.0, 0.5, op.kernel());
    CHECK_THROWS_AS(chapman_check(real, all_triples(real), 4), ArgumentError);
}

TEST_CASE("linear chain is the classical markov chain") {
    const StateSpace s3({"a", "b", "c"});
    const oracle::Mat p{{0.2, 0.3, 0.5}, {0.0, 1.0, 0.0}, {0.6, 0.0, 0.4}};
    const oracle::Vec pi{0.1, 0.6, 0.3};
    const auto op = OneStepOperator::linear(s3, p);
    const ExpectationModel mu0(PenaltyModel::linear(Scenario(s3, pi)));
    std::mt19937_64 rng(3);
    const auto f = oracle::random_vector(rng, 9);
    double ref = 0.0;
    for (std::size_t x = 0; x < 3; ++x)
        for (std::size_t y = 0; y < 3; ++y)
            ref += pi[x] * p[x][y] * f[x * 3 + y];
    CHECK(std::abs(markov_eval(op, mu0, {0, 1}, f) - ref) <= 1e-14);

    // E_{0,2}(g o pr_0) = mu0(g)
    const auto g = oracle::random_vector(rng, 3);
    std::vector<double> lifted(9);
    for (std::size_t i = 0; i < 9; ++i)
        lifted[i] = g[i / 3];
    CHECK(std::abs(markov_eval(op, mu0, {0, 2}, lifted) - oracle::dot(pi, g)) <= 1e-14);
}

TEST_CASE("sublinear chain equals the policy enumeration") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        oracle::ChainSpec c;
        c.matrices = {oracle::random_stochastic(rng, 2), oracle::random_stochastic(rng, 2)};
        c.initial = {oracle::random_simplex(rng, 2), oracle::random_simplex(rng, 2)};
        c.j = {0, 1, 2};
        c.horizon = 2;
        const auto op = OneStepOperator::sublinear(two(), c.matrices);
        const auto mu0 = initial_model(two(), c.initial);
        const auto f = oracle::random_vector(rng, 8, -3.0, 3.0);
        const double bi = markov_eval(op, mu0, {0, 1, 2}, f);
        CHECK(std::abs(bi - oracle::history_enumeration(c, f)) <= 1e-12);
        CHECK(std::abs(bi - oracle::history_flow_lp(c, f)) <= 1e-10);
        CHECK(oracle::markov_selection_enumeration(c, f) <= bi + 1e-12);
        CHECK(std::abs(bi - dual_eval(markov_scenarios(op, mu0, {0, 1, 2}), f).value) <= 1e-12);

        // single-coordinate reward: Markov selections are enough
        oracle::ChainSpec term = c;
        term.j = {2};
        const auto h = oracle::random_vector(rng, 2);
        const double bt = markov_eval(op, mu0, {2}, h);
        CHECK(std::abs(bt - oracle::markov_selection_enumeration(term, h)) <= 1e-12);

        // gaps in J
        oracle::ChainSpec gap = c;
        gap.j = {1, 3};
        gap.horizon = 3;
        const auto f2 = oracle::random_vector(rng, 4);
        CHECK(std::abs(markov_eval(op, mu0, {1, 3}, f2) - oracle::history_enumeration(gap, f2)) <= 1e-12);
        CHECK(std::abs(markov_eval(op, mu0, {1, 3}, f2) -
                       dual_eval(markov_scenarios(op, mu0, {1, 3}), f2).value) <= 1e-12);
    }
}

TEST_CASE("markov selections are only a lower bound for path rewards") {
    const oracle::Mat half{{0.5, 0.5}, {0.5, 0.5}};
    const oracle::Mat to0{{1.0, 0.0}, {1.0, 0.0}};
    const oracle::Mat to1{{0.0, 1.0}, {0.0, 1.0}};
    oracle::ChainSpec c{{half, to0, to1}, {{0.5, 0.5}}, {0, 1, 2}, 2};
    // f = 1{x1 = 0} 1{x2 = x0}
    std::vector<double> f(8, 0.0);
    f[0b000] = 1.0;
    f[0b101] = 1.0;
    const auto op = OneStepOperator::sublinear(two(), c.matrices);
    const auto mu0 = initial_model(two(), c.initial);
    CHECK(markov_eval(op, mu0, {0, 1, 2}, f) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(oracle::history_enumeration(c, f) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(oracle::markov_selection_enumeration(c, f) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("markov families are consistent") {
    std::mt19937_64 rng(17);
    const StateSpace s3({"a", "b", "c"});
    const auto op = OneStepOperator::sublinear(
        s3, {oracle::random_stochastic(rng, 3), oracle::random_stochastic(rng, 3)});
    const auto mu0 = initial_model(s3, {oracle::random_simplex(rng, 3), oracle::random_simplex(rng, 3)});
    const auto pairs = all_pairs(subsets_up_to(2));

    const auto ev = markov_chain_family(op, mu0, 2);
    const auto r1 = check_consistency_expectations(ev, pairs, 6, 1);
    CHECK(r1.pass());
    CHECK(r1.max_discrepancy() <= 1e-12);

    const auto sc = markov_chain_family(op, mu0, 2, FamilyForm::scenario);
    CHECK(check_consistency_expectations(sc, pairs, 6, 1).pass());
    CHECK(check_consistency_scenario_sets(sc, pairs).pass());

    for (int trial = 0; trial < 10; ++trial) {
        const auto f = oracle::random_vector(rng, 27);
        CHECK(std::abs(ev.entry({0, 1, 2}).evaluate(f) - sc.entry({0, 1, 2}).evaluate(f)) <= 1e-12);
    }

    const auto conv = OneStepOperator::convex(s3, op.matrices(), {0.0, 0.3});
    CHECK(check_consistency_expectations(markov_chain_family(conv, mu0, 2), pairs, 6, 2).pass());
    CHECK_THROWS_AS(markov_chain_family(conv, mu0, 2, FamilyForm::scenario).entry({0, 1}), PreconditionError);
    CHECK_THROWS_AS(markov_chain_family(op, mu0, 0), ArgumentError);
    CHECK_THROWS_AS(markov_chain_family(op, mu0, 30), ArgumentError);
    CHECK_THROWS_AS(markov_scenarios(op, mu0, {0, 1, 2, 3, 4, 5, 6}, 50), ArgumentError);
}

TEST_CASE("two-point identity") {
    std::mt19937_64 rng(23);
    const StateSpace s3({"a", "b", "c"});
    const auto mats = std::vector<Matrix>{oracle::random_stochastic(rng, 3), oracle::random_stochastic(rng, 3)};
    const auto mu0 = initial_model(s3, {oracle::random_simplex(rng, 3), oracle::random_simplex(rng, 3)});
    const std::vector<OneStepOperator> ops{
        OneStepOperator::sublinear(s3, mats), OneStepOperator::convex(s3, mats, {0.0, 0.25}),
        OneStepOperator::entropic(s3, mats[0], 1.5)};
    const std::vector<double> one(3, 1.0);
    for (const auto& op : ops) {
        const auto fam = markov_chain_family(op, mu0, 3);
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const auto f = oracle::random_vector(rng, 3, 0.0, 2.0);
            const auto g = oracle::random_vector(rng, 3, 0.0, 2.0);
            const double d = std::max(two_point_identity_check(fam, op, mu0, f, g, 0, 2),
                                      two_point_identity_check(fam, op, mu0, f, g, 1, 3));
            worst = std::max(worst, d);
            CHECK(two_point_identity_check(fam, op, mu0, one, g, 0, 2) <= 1e-12);
        }
        if (op.form() == OperatorForm::sublinear)
            CHECK(worst <= 1e-12);
        else
            CHECK(worst > 1e-6); // factorization needs positive homogeneity
    }
    const auto lin = OneStepOperator::linear(s3, mats[1]);
    const auto fam = markov_chain_family(lin, mu0, 2);
    const auto f = oracle::random_vector(rng, 3);
    const auto g = oracle::random_vector(rng, 3);
    CHECK(two_point_identity_check(fam, lin, mu0, f, g, 0, 1) <= 1e-10);
    CHECK_THROWS_AS(two_point_identity_check(fam, lin, mu0, f, g, 1, 1), ArgumentError);
}
