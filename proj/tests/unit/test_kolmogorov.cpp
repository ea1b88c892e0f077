#include "doctest.h"

#include "oracles.hpp"

#include "robustexp/bar_extension.hpp"
#include "robustexp/consistency.hpp"
#include "robustexp/errors.hpp"

#include <cmath>
#include <random>
#include <thread>

using namespace robustexp;

namespace {

const StateSpace& binary() {
    static const StateSpace s({"0", "1"});
    return s;
}

/// Two-scenario explicit model on S^J built from product measures.
ExpectationModel product_pair(const StateSpace& base, const FiniteSubset& j, const std::vector<oracle::Vec>& factors) {
    const auto sp = product_space(base, j);
    std::vector<Scenario> sc;
    for (const auto& p : factors) {
        std::vector<double> w(sp.size(), 1.0);
        for (std::size_t i = 0; i < sp.size(); ++i)
            for (std::size_t v : tuple_of(i, base.size(), j.size()))
                w[i] *= p[v];
        double t = 0.0;
        for (double x : w)
            t += x;
        for (double& x : w)
            x /= t;
        sc.emplace_back(sp, std::move(w));
    }
    return ExpectationModel(PenaltyModel::sublinear(std::move(sc)));
}

} // namespace

TEST_CASE("subsets and projection") {
    CHECK(make_subset({3, 1, 2}) == FiniteSubset{1, 2, 3});
    CHECK_THROWS_AS(make_subset({1, 1}), ArgumentError);
    CHECK(parse_subset("{0, 2,5}") == FiniteSubset{0, 2, 5});
    CHECK(to_string(FiniteSubset{0, 2}) == "{0,2}");

    const auto sk = product_space(binary(), {1});
    const RandomVariable f(sk, {7.0, 9.0});
    const auto p = project_function(f, {1, 2});
    REQUIRE(p.size() == 4);
    CHECK(std::vector<double>(p.values().begin(), p.values().end()) == std::vector<double>{7, 7, 9, 9});
    CHECK(project_function(f, {1}).values()[1] == 9.0);
    CHECK_THROWS_AS(project_function(f, {0, 2}), ArgumentError);

    std::mt19937_64 rng(2);
    const StateSpace s3({"a", "b", "c"});
    const RandomVariable g(product_space(s3, {1, 3}), oracle::random_vector(rng, 9));
    const auto direct = project_function(g, {0, 1, 2, 3});
    const auto twostep = project_function(project_function(g, {1, 2, 3}), {0, 1, 2, 3});
    CHECK(std::vector<double>(direct.values().begin(), direct.values().end()) ==
          std::vector<double>(twostep.values().begin(), twostep.values().end()));

    CHECK_THROWS_AS(product_space(s3, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13}), ArgumentError);
}

TEST_CASE("pushforward_marginal") {
    std::mt19937_64 rng(4);
    const FiniteSubset j{1, 2};
    const auto sp = product_space(binary(), j);
    std::vector<Scenario> sc{Scenario(sp, oracle::random_simplex(rng, 4)), Scenario(sp, oracle::random_simplex(rng, 4))};
    const ExpectationModel m(PenaltyModel::sublinear(sc));
    CHECK(pushforward_marginal(m, j, j).penalty()->scenarios()[0].weights()[3] == sc[0][3]);
    const auto img = pushforward_marginal(m, j, {2});
    for (std::size_t k = 0; k < 2; ++k) {
        // brute force: x2 = 0 at tuples (0,0), (1,0)
        const auto w = img.penalty()->scenarios()[k].weights();
        CHECK(std::abs(w[0] - (sc[k][0] + sc[k][2])) <= 1e-14);
        CHECK(std::abs(w[1] - (sc[k][1] + sc[k][3])) <= 1e-14);
    }
    const auto prod = product_pair(binary(), {0, 1, 2}, {{0.3, 0.7}});
    const auto fac = pushforward_marginal(prod, {0, 1, 2}, {1});
    CHECK(fac.penalty()->scenarios()[0][0] == doctest::Approx(0.3).epsilon(1e-14));

    // functoriality L -> J -> K equals L -> K
    const auto l = product_space(binary(), {0, 1, 2});
    const ExpectationModel ml(PenaltyModel::sublinear({Scenario(l, oracle::random_simplex(rng, 8))}));
    const auto a = pushforward_marginal(pushforward_marginal(ml, {0, 1, 2}, {0, 2}), {0, 2}, {2});
    const auto b = pushforward_marginal(ml, {0, 1, 2}, {2});
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::abs(a.penalty()->scenarios()[0][i] - b.penalty()->scenarios()[0][i]) <= 1e-14);
}

TEST_CASE("families: dirac, full simplex, iid") {
    const auto dir = dirac_family(binary(), {1, 0, 1});
    const auto e = dir.entry({0, 1});
    REQUIRE(e.penalty() != nullptr);
    CHECK(e.penalty()->scenarios()[0][2] == 1.0);

    const auto pairs = all_pairs({{0, 1, 2}, {1, 3}});
    for (const auto* fam : {&dir}) {
        CHECK(check_consistency_expectations(*fam, pairs, 10).pass());
        CHECK(check_consistency_scenario_sets(*fam, pairs).pass());
    }
    const auto simplex = full_simplex_family(binary());
    CHECK(check_consistency_expectations(simplex, pairs, 10).pass());
    CHECK(check_consistency_scenario_sets(simplex, pairs).pass());
    const auto iid = iid_family(Scenario(binary(), {0.25, 0.75}));
    CHECK(check_consistency_expectations(iid, pairs, 10).pass());
    CHECK(check_consistency_scenario_sets(iid, pairs).pass());
    CHECK(check_consistency_expectations(iid, {{{0, 1}, {0, 1}}}, 5).pass());

    const auto csv = check_consistency_expectations(iid, {{{0, 1}, {1}}}, 3).to_csv();
    CHECK(csv.rfind("schema,J,K,max_discrepancy,pass\nv1,\"{0,1}\",\"{1}\",", 0) == 0);
}

TEST_CASE("broken explicit family") {
    const double eps = 0.05;
    std::map<FiniteSubset, ExpectationModel> entries;
    entries.emplace(FiniteSubset{0, 1}, product_pair(binary(), {0, 1}, {{0.5, 0.5}, {0.2, 0.8}}));
    entries.emplace(FiniteSubset{0}, product_pair(binary(), {0}, {{0.5, 0.5}, {0.2, 0.8}}));
    entries.emplace(FiniteSubset{1}, product_pair(binary(), {1}, {{0.5, 0.5}, {0.2 + eps, 0.8 - eps}}));
    const auto fam = MarginalFamily::explicit_entries(binary(), entries);
    const std::vector<SubsetPair> pairs{{{0, 1}, {0}}, {{0, 1}, {1}}};
    const auto primal = check_consistency_expectations(fam, pairs, 50);
    const auto dual = check_consistency_scenario_sets(fam, pairs);
    CHECK(primal.rows[0].pass);
    CHECK_FALSE(primal.rows[1].pass);
    // the indicator of state 1 alone shows exactly eps; random probes up to 2 eps
    CHECK(primal.rows[1].max_discrepancy >= eps - 1e-12);
    CHECK(primal.rows[1].max_discrepancy <= 2 * eps + 1e-12);
    REQUIRE(primal.rows[1].witness.has_value());
    CHECK(dual.rows[0].pass);
    CHECK_FALSE(dual.rows[1].pass);

    CHECK_THROWS_AS(check_consistency_expectations(fam, {{{0, 1}, {2}}}, 1), ArgumentError);
    CHECK_THROWS_AS(check_consistency_expectations(fam, {{{0, 2}, {0}}}, 1), ArgumentError);

    // shrinking Q_J by deleting an extreme scenario whose image is extreme in Q_K
    const auto full = entries.at({0, 1});
    const auto shrunk = ExpectationModel(PenaltyModel::sublinear({full.penalty()->scenarios()[0]}));
    const auto fam2 = MarginalFamily::explicit_entries(
        binary(), {{FiniteSubset{0, 1}, shrunk}, {FiniteSubset{0}, entries.at({0})}});
    CHECK_FALSE(check_consistency_scenario_sets(fam2, {{{0, 1}, {0}}}).pass());
    CHECK_FALSE(check_consistency_expectations(fam2, {{{0, 1}, {0}}}, 20).pass());

    const auto pen = ExpectationModel(PenaltyModel({Scenario::uniform(product_space(binary(), {0})),
                                                    Scenario::dirac(product_space(binary(), {0}), 0)},
                                                   {0.0, 1.0}));
    const auto fam3 = fam.with_override({0}, pen);
    CHECK_THROWS_AS(check_consistency_scenario_sets(fam3, {{{0, 1}, {0}}}), PreconditionError);
}

TEST_CASE("cylinder_eval") {
    const auto dir = dirac_family(binary(), {1, 0, 1, 1});
    const auto sp = product_space(binary(), {0, 1});
    std::vector<double> ind(4, 0.0);
    ind[index_of_tuple({1, 0}, 2)] = 1.0;
    const CylinderFunction g({0, 1}, RandomVariable(sp, ind));
    CHECK(cylinder_eval(dir, g) == 1.0);
    CHECK(cylinder_eval(dir, reexpress(g, {0, 1, 5})) == 1.0);
    CHECK(cylinder_eval(dir, CylinderFunction({2, 3}, RandomVariable::constant(product_space(binary(), {2, 3}), 2.5))) ==
          2.5);

    std::mt19937_64 rng(12);
    const auto simplex = full_simplex_family(binary());
    const CylinderFunction h({1, 2}, RandomVariable(product_space(binary(), {1, 2}), oracle::random_vector(rng, 4)));
    CHECK(std::abs(cylinder_eval(simplex, h) - cylinder_eval(simplex, reexpress(h, {0, 1, 2, 4}))) <= 1e-9);
    const CylinderFunction single({3}, RandomVariable(product_space(binary(), {3}), {0.25, -1.0}));
    CHECK(cylinder_eval(simplex, single) == simplex.entry({3}).evaluate(single.f));

    std::map<FiniteSubset, ExpectationModel> entries;
    entries.emplace(FiniteSubset{0, 1}, product_pair(binary(), {0, 1}, {{0.5, 0.5}}));
    entries.emplace(FiniteSubset{0}, product_pair(binary(), {0}, {{0.5, 0.5}}));
    entries.emplace(FiniteSubset{1}, product_pair(binary(), {1}, {{0.1, 0.9}}));
    const auto bad = MarginalFamily::explicit_entries(binary(), entries);
    const CylinderFunction probe({0, 1}, RandomVariable::constant(product_space(binary(), {0, 1}), 1.0));
    try {
        cylinder_eval(bad, probe);
        FAIL("expected a consistency error");
    } catch (const ConsistencyError& e) {
        CHECK(e.witness() == "{0,1};{1}");
    }
}

TEST_CASE("extension_marginal") {
    const auto dir = dirac_family(binary(), {1, 1});
    const auto m = extension_marginal(dir, {0});
    CHECK(m.marginal.size() == 1);
    CHECK(m.marginal.scenarios()[0][1] == 1.0);
    CHECK_FALSE(m.path_set_unique);
    CHECK_FALSE(m.verified_against.empty());

    const auto simplex = full_simplex_family(binary());
    const auto sm = extension_marginal(simplex, {0, 2});
    CHECK(sm.marginal.size() == 4);
}

TEST_CASE("concurrent cache access") {
    const auto simplex = full_simplex_family(StateSpace::indexed(3));
    std::vector<std::thread> ts;
    std::vector<double> out(8);
    for (std::size_t t = 0; t < out.size(); ++t)
        ts.emplace_back([&, t] {
            const FiniteSubset j{0, static_cast<Index>(1 + t % 3)};
            out[t] = simplex.entry(j).evaluate(std::vector<double>(9, 1.0));
        });
    for (auto& t : ts)
        t.join();
    for (double v : out)
        CHECK(v == 1.0);
}

TEST_CASE("bar extension and the gap example") {
    const auto simplex = full_simplex_family(binary());
    const std::vector<std::size_t> y{0, 1, 1, 0};
    const auto r = bar_extension_eval(simplex, gap_sequence(binary(), y), 1e-12, 10);
    CHECK(r.value == 1.0);
    CHECK(r.converged);

    const auto dir = dirac_family(binary(), y);
    const auto rd = bar_extension_eval(dir, gap_sequence(binary(), y), 1e-12, 10);
    CHECK(rd.value == 0.0);

    // linear case: monotone convergence of an ordinary expectation
    const Scenario p(binary(), {0.3, 0.7});
    const auto iid = iid_family(p);
    std::vector<std::size_t> ones(8, 1);
    const auto lin = bar_extension_eval(iid, gap_sequence(binary(), ones), 1e-15, 8);
    CHECK(lin.value == doctest::Approx(1.0 - std::pow(0.7, 8)).epsilon(1e-13));
    for (std::size_t n = 1; n <= 8; ++n)
        CHECK(lin.certificate.partial_values[n - 1] == doctest::Approx(1.0 - std::pow(0.7, n)).epsilon(1e-13));

    std::vector<CylinderFunction> flat;
    for (int n = 0; n < 5; ++n)
        flat.push_back(gap_function(binary(), n < 1 ? std::vector<std::size_t>{0} : std::vector<std::size_t>{0, 0}));
    const auto stop = bar_extension_eval(iid, CylinderSequence::from_list(Direction::increasing, flat), 1e-12, 10);
    CHECK(stop.value == doctest::Approx(1.0 - 0.09));
    CHECK(stop.certificate.terms == 3);

    std::vector<CylinderFunction> down{gap_function(binary(), {0, 0}), gap_function(binary(), {0})};
    CHECK_THROWS_AS(bar_extension_eval(iid, CylinderSequence::from_list(Direction::increasing, down), 1e-12, 3),
                    PreconditionError);

    for (std::size_t d : {1u, 3u, 8u, 16u}) {
        std::vector<std::size_t> yy(d);
        for (std::size_t i = 0; i < d; ++i)
            yy[i] = (i * 7 + d) % 2;
        const auto demo = hat_vs_bar_gap_demo(dirac_family(binary(), yy), d);
        CHECK(demo.hat_value == 1.0);
        CHECK(demo.bar_limit == 0.0);
        CHECK(demo.y == yy);
        for (double v : demo.lp_hat_by_depth)
            CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(demo.hat_value >= demo.bar_limit);
    }
    CHECK_THROWS_AS(hat_vs_bar_gap_demo(simplex, 3), PreconditionError);
    CHECK_THROWS_AS(hat_vs_bar_gap_demo(dirac_family(StateSpace::indexed(3), {0}), 1), PreconditionError);
}
