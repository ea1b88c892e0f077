#include "doctest.h"

#include "oracles.hpp"

#include "robustexp/axioms.hpp"
#include "robustexp/conjugate.hpp"
#include "robustexp/errors.hpp"
#include "robustexp/expectation.hpp"
#include "robustexp/pushforward.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace robustexp;

namespace {

PenaltyModel random_model(std::mt19937_64& rng, std::size_t n, std::size_t m, bool sublinear) {
    const auto sp = StateSpace::indexed(n);
    std::vector<Scenario> sc;
    std::vector<double> pen;
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (std::size_t k = 0; k < m; ++k) {
        sc.emplace_back(sp, oracle::random_simplex(rng, n));
        pen.push_back(sublinear || k == 0 ? 0.0 : u(rng));
    }
    return {std::move(sc), std::move(pen)};
}

} // namespace

TEST_CASE("state space and product labels") {
    StateSpace s({"a", "b"});
    CHECK(s.size() == 2);
    CHECK(s.index_of("b") == 1);
    CHECK_THROWS_AS(StateSpace({"a", "a"}), ArgumentError);
    CHECK_THROWS_AS(StateSpace(std::vector<std::string>{}), ArgumentError);
    const auto p = StateSpace::product(s, {1, 2});
    CHECK(p.size() == 4);
    CHECK(p.label(1) == "a,b");
    CHECK(p.label(2) == "b,a");
}

TEST_CASE("scenario validation") {
    const auto s = StateSpace::indexed(2);
    CHECK_THROWS_AS(Scenario(s, {0.5, 0.6}), DomainError);
    CHECK_THROWS_AS(Scenario(s, {1.5, -0.5}), DomainError);
    CHECK_THROWS_AS(Scenario(s, {1.0}), DimensionError);
    CHECK_NOTHROW(Scenario(s, {0.3, 0.7}));
}

TEST_CASE("evaluate examples") {
    const auto s = StateSpace::indexed(2);
    const ExpectationModel mx(PenaltyModel::sublinear({Scenario::dirac(s, 0), Scenario::dirac(s, 1)}));
    CHECK(mx.evaluate(RandomVariable(s, {3.0, -1.0})) == 3.0);
    for (double a : {-7.25, 0.0, 1e-3, 42.0})
        CHECK(mx.evaluate(RandomVariable::constant(s, a)) == a);

    const ExpectationModel ent(EntropicModel(Scenario::uniform(s), 1.0));
    const double v = ent.evaluate(RandomVariable(s, {0.0, 1.0}));
    CHECK(v == doctest::Approx(std::log((1.0 + std::exp(1.0)) / 2.0)).epsilon(1e-14));
    CHECK(v == doctest::Approx(0.62011).epsilon(1e-5));
    CHECK(v == doctest::Approx(oracle::entropic_by_simplex_grid({0.5, 0.5}, 1.0, {0.0, 1.0})).epsilon(1e-8));

    const auto other = StateSpace::indexed(3);
    CHECK_THROWS_AS(mx.evaluate(RandomVariable(other, {0, 0, 0})), DimensionError);
    const std::vector<double> bad{1.0, std::nan("")};
    CHECK_THROWS_AS(mx.evaluate(bad), DomainError);
}

TEST_CASE("penalty model invariants") {
    const auto s = StateSpace::indexed(2);
    CHECK_THROWS_AS(PenaltyModel({}, {}), ArgumentError);
    CHECK_THROWS_AS(PenaltyModel({Scenario::dirac(s, 0)}, {1.0}), DomainError);
    CHECK_THROWS_AS(PenaltyModel({Scenario::dirac(s, 0)}, {-1.0}), DomainError);
}

TEST_CASE("dual_eval examples and brute force") {
    const auto s = StateSpace::indexed(2);
    PenaltyModel pm({Scenario::dirac(s, 0), Scenario::dirac(s, 1)}, {0.0, 10.0});
    auto r = dual_eval(pm, RandomVariable(s, {5.0, 2.0}));
    CHECK(r.value == 5.0);
    CHECK(r.argmax == 0);
    r = dual_eval(pm, RandomVariable(s, {-20.0, 2.0}));
    CHECK(r.value == -8.0);
    CHECK(r.argmax == 1);

    const auto sub = PenaltyModel::sublinear({Scenario::dirac(s, 0), Scenario::dirac(s, 1)});
    r = dual_eval(sub, RandomVariable(s, {5.0, 2.0}));
    CHECK(r.value == 5.0);
    CHECK(r.argmax == 0);
    r = dual_eval(sub, RandomVariable(s, {1.0, 1.0}));
    CHECK(r.argmax == 0);

    const Scenario mu(s, {0.25, 0.75});
    CHECK(dual_eval(PenaltyModel::linear(mu), RandomVariable(s, {4.0, 8.0})).value == doctest::Approx(7.0));

    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng() % 6, m = 1 + rng() % 5;
        const auto model = random_model(rng, n, m, t % 2 == 0);
        oracle::Mat sc;
        for (const auto& x : model.scenarios())
            sc.emplace_back(x.weights().begin(), x.weights().end());
        for (int q = 0; q < 20; ++q) {
            const auto x = oracle::random_vector(rng, n, -5.0, 5.0);
            CHECK(std::abs(dual_eval(model, x).value - oracle::brute_max(sc, model.penalties(), x)) <= 1e-14);
        }
    }
}

TEST_CASE("verify_axioms") {
    std::mt19937_64 rng(3);
    const auto pm = random_model(rng, 4, 3, false);
    const ExpectationModel model(pm);
    std::vector<RandomVariable> samples;
    for (int i = 0; i < 10; ++i)
        samples.emplace_back(model.space(), oracle::random_vector(rng, 4, -3.0, 3.0));
    const auto rep = verify_axioms(model, samples);
    CHECK(rep.convex_expectation());
    for (const auto* c : rep.checks())
        if (c != &rep.positive_homogeneity)
            CHECK(c->worst_violation <= 1e-12);

    const auto sp = StateSpace::indexed(2);
    const ExpectationModel ent(EntropicModel(Scenario::uniform(sp), 1.0));
    std::vector<RandomVariable> es{RandomVariable(sp, {0.0, 1.0}), RandomVariable(sp, {1.0, -2.0}),
                                   RandomVariable(sp, {0.5, 0.5})};
    const auto er = verify_axioms(ent, es);
    CHECK(er.convexity.passed);
    CHECK(er.convex_expectation());
    CHECK_FALSE(er.positive_homogeneity.passed);
    // the strict inequality behind the failure: E(2X) > 2E(X) is false, E(2X) < 2E(X)
    const double e1 = ent.evaluate(es[0]);
    const double e2 = ent.evaluate(std::vector<double>{0.0, 2.0});
    CHECK(std::abs(e2 - 2.0 * e1) > 1e-3);

    const auto broken = ExpectationModel::oracle(
        sp, [](std::span<const double> x) { return std::pow(std::max(std::abs(x[0]), std::abs(x[1])), 2); },
        "sup-norm squared");
    const auto br = verify_axioms(broken, es);
    CHECK_FALSE(br.constant_preserving.passed);

    CHECK_THROWS_AS(verify_axioms(model, std::span<const RandomVariable>{}), ArgumentError);
}

TEST_CASE("conjugate") {
    const auto s = StateSpace::indexed(3);
    const auto pm = PenaltyModel::sublinear(
        {Scenario(s, {0.5, 0.5, 0.0}), Scenario(s, {0.0, 0.5, 0.5}), Scenario(s, {0.2, 0.2, 0.6})});
    const ExpectationModel model(pm);
    for (const auto& mu : pm.scenarios()) {
        const auto c = conjugate(model, mu, 10.0);
        CHECK(std::abs(c.estimate) <= 1e-9);
        REQUIRE(c.exact.has_value());
        CHECK(*c.exact == doctest::Approx(0.0));
    }
    const Scenario out(s, {1.0, 0.0, 0.0});
    const auto c = conjugate(model, out, 10.0);
    CHECK(std::isinf(*c.exact));
    CHECK(c.estimate > 1.0);
    CHECK_THROWS_AS(conjugate(model, out, 0.0), ArgumentError);

    // penalty accounting: mixing two scenarios costs the mixed penalty
    const auto s2 = StateSpace::indexed(2);
    PenaltyModel pen({Scenario::dirac(s2, 0), Scenario::dirac(s2, 1)}, {0.0, 2.0});
    CHECK(conjugate_exact(pen, Scenario(s2, {0.25, 0.75})) == doctest::Approx(1.5));
    CHECK(conjugate(ExpectationModel(pen), Scenario(s2, {0.25, 0.75}), 50.0).estimate ==
          doctest::Approx(1.5).epsilon(1e-9));

    // entropic: KL(mu||p)/theta
    const ExpectationModel ent(EntropicModel(Scenario::uniform(s2), 1.0));
    const auto ce = conjugate(ent, Scenario::dirac(s2, 0), 30.0);
    CHECK(std::abs(ce.estimate - std::log(2.0)) <= 1e-4);
    CHECK_FALSE(ce.exact.has_value());
    std::mt19937_64 rng(5);
    for (int t = 0; t < 5; ++t) {
        const auto p = oracle::random_simplex(rng, 3);
        const auto mu = oracle::random_simplex(rng, 3);
        const double theta = 0.5 + t;
        const ExpectationModel e3(EntropicModel(Scenario(s, p), theta));
        const auto r = conjugate(e3, Scenario(s, mu), 30.0);
        CHECK(std::abs(r.estimate - oracle::kl(mu, p) / theta) <= 1e-4);
    }

    // definition of sup, checked through the oracle kind as well
    const auto orc = ExpectationModel::oracle(s, [pm](std::span<const double> x) { return dual_eval(pm, x).value; });
    const std::vector<double> x{1.0, -2.0, 0.5};
    const auto dv = dual_eval(pm, x);
    const auto& mu = pm.scenarios()[dv.argmax];
    CHECK(conjugate(orc, mu, 5.0).estimate >= mu.expect(x) - orc.evaluate(x) - 1e-12);
}

TEST_CASE("scenario membership") {
    const auto s = StateSpace::indexed(2);
    const auto pm = PenaltyModel::sublinear({Scenario(s, {0.25, 0.75}), Scenario(s, {0.75, 0.25})});
    CHECK(scenario_membership(pm, pm.scenarios()[0]).member);
    CHECK(scenario_membership(pm, Scenario(s, {0.5, 0.5})).member);
    const Scenario d = Scenario::dirac(s, 0);
    const auto r = scenario_membership(pm, d);
    CHECK_FALSE(r.member);
    CHECK(r.distance == doctest::Approx(0.5));
    REQUIRE(r.witness.has_value());
    const auto f = r.witness->values();
    const double lhs = d.expect(f);
    double rhs = -1e300;
    for (const auto& mu : pm.scenarios())
        rhs = std::max(rhs, mu.expect(f));
    CHECK(lhs > rhs + 1e-9);

    PenaltyModel pen({Scenario::dirac(s, 0), Scenario::dirac(s, 1)}, {0.0, 1.0});
    CHECK_THROWS_AS(scenario_membership(pen, d), PreconditionError);
}

TEST_CASE("pushforward") {
    const StateSpace omega({"a", "b", "c"});
    const StateSpace target({"a", "z"});
    const StateMap t{0, 1, 1};
    const auto pushed = push_scenario(Scenario(omega, {0.2, 0.3, 0.5}), t, target);
    CHECK(pushed[0] == doctest::Approx(0.2));
    CHECK(pushed[1] == doctest::Approx(0.8));
    CHECK_THROWS_AS(push_scenario(Scenario::uniform(omega), StateMap{0, 1, 2}, target), DomainError);

    std::mt19937_64 rng(9);
    const auto pm = random_model(rng, 3, 3, true);
    const ExpectationModel model(pm);
    const auto id = pushforward(model, StateMap{0, 1, 2}, pm.space());
    for (int q = 0; q < 20; ++q) {
        const auto y = oracle::random_vector(rng, 3);
        CHECK(std::abs(id.evaluate(y) - model.evaluate(y)) <= 1e-15);
    }

    const auto sp = StateSpace::indexed(3);
    const ExpectationModel m2(pm);
    const auto img = pushforward(m2, t, target);
    REQUIRE(img.penalty() != nullptr);
    std::set<std::vector<long long>> expect, got;
    for (const auto& mu : pm.scenarios()) {
        const auto w = mu.weights();
        expect.insert(canonical_key(std::vector<double>{w[0], w[1] + w[2]}));
    }
    for (const auto& nu : img.penalty()->scenarios())
        got.insert(canonical_key(nu.weights()));
    CHECK(expect == got);
    for (int q = 0; q < 20; ++q) {
        const RandomVariable y(target, oracle::random_vector(rng, 2));
        CHECK(std::abs(img.evaluate(y) - m2.evaluate(pull_back(y, t, sp))) <= 1e-12);
    }

    const ExpectationModel ent(EntropicModel(Scenario::uniform(sp), 2.0));
    const auto ei = pushforward(ent, t, target);
    CHECK(ei.kind() == ModelKind::oracle);
    const RandomVariable y(target, {1.0, -1.0});
    CHECK(ei.evaluate(y) == ent.evaluate(pull_back(y, t, sp)));
}
