#include "doctest.h"

#include "json.hpp"
#include "robustexp_cli/run.hpp"

#include "robustexp/consistency.hpp"
#include "robustexp/extension.hpp"
#include "robustexp/gaussian.hpp"
#include "robustexp/markov_chain.hpp"
#include "robustexp/model_document.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace robustexp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fixture(const char* name) { return std::string(ROBUSTEXP_FIXTURES) + "/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(cli::RunConfig c) {
    std::ostringstream out, err;
    const int code = cli::run(c, out, err);
    return {code, out.str(), err.str()};
}

cli::RunConfig config(const char* command, const char* input = nullptr) {
    cli::RunConfig c;
    c.command = command;
    if (input)
        c.input = fixture(input);
    return c;
}

fs::path scratch(const char* name) {
    const auto dir = fs::temp_directory_path() / "robustexp_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string strip_summary(const std::string& s) {
    const auto pos = s.rfind('\n', s.size() - 2);
    return s.substr(0, pos + 1);
}

} // namespace

TEST_CASE("demo-gap prints hat=1 bar_limit=0") {
    auto c = config("demo-gap");
    c.y = "0110100110010110";
    const auto r = run_cli(c);
    CHECK(r.code == cli::kPass);
    CHECK(r.out.find("hat=1 bar_limit=0\n") != std::string::npos);
    const auto j = json::parse(strip_summary(r.out));
    CHECK(j["schema"] == "v1");
    CHECK(j["hat"].get<double>() == 1.0);
    CHECK(j["bar_limit"].get<double>() == 0.0);
}

TEST_CASE("demo-gap rejects a non-binary path") {
    auto c = config("demo-gap");
    c.y = "0120";
    CHECK(run_cli(c).code == cli::kInputError);
}

TEST_CASE("axioms on a penalty model passes every check") {
    const auto r = run_cli(config("axioms", "penalty_model.json"));
    CHECK(r.code == cli::kPass);
    const auto j = json::parse(strip_summary(r.out));
    CHECK(j["kind"] == "penalty");
    for (const auto& ch : j["checks"])
        if (ch["name"] != "positive_homogeneity")
            CHECK_MESSAGE(ch["passed"].get<bool>(), ch["name"]);
    CHECK(j["convex_expectation"].get<bool>());
}

TEST_CASE("axioms on an entropic model reports it is not sublinear") {
    const auto r = run_cli(config("axioms", "entropic_model.json"));
    CHECK(r.code == cli::kPass);
    const auto j = json::parse(strip_summary(r.out));
    CHECK_FALSE(j["sublinear"].get<bool>());
}

TEST_CASE("malformed documents exit 2 with a line or field diagnostic") {
    SUBCASE("syntax error") {
        const auto r = run_cli(config("axioms", "malformed.json"));
        CHECK(r.code == cli::kInputError);
        CHECK(r.err.find("line 5") != std::string::npos);
    }
    SUBCASE("invalid field") {
        const auto r = run_cli(config("axioms", "bad_field.json"));
        CHECK(r.code == cli::kInputError);
        CHECK(r.err.find("'/scenarios/1'") != std::string::npos);
    }
    SUBCASE("missing file") {
        const auto r = run_cli(config("axioms", "does_not_exist.json"));
        CHECK(r.code == cli::kInputError);
    }
    SUBCASE("missing input flag") {
        CHECK(run_cli(config("extend")).code == cli::kInputError);
    }
    SUBCASE("unknown command") {
        CHECK(run_cli(config("frobnicate")).code == cli::kInputError);
    }
}

TEST_CASE("schema other than v1 is rejected") {
    const auto path = scratch("schema_v2.json");
    std::ofstream(path) << R"({"schema": "v2", "space": ["a"], "scenarios": [[1]]})";
    cli::RunConfig c = config("axioms");
    c.input = path.string();
    const auto r = run_cli(c);
    CHECK(r.code == cli::kInputError);
    CHECK(r.err.find("'/schema'") != std::string::npos);
}

TEST_CASE("consistency on the broken fixture exits 1 with a witness") {
    const auto r = run_cli(config("consistency", "broken_family.json"));
    CHECK(r.code == cli::kFail);
    CHECK(r.err.find("J={0,1} K={0}") != std::string::npos);
    CHECK(r.err.find(" f=[") != std::string::npos);
    CHECK(r.out.rfind("schema,J,K,max_discrepancy,pass\n", 0) == 0);
}

TEST_CASE("consistency passes on consistent fixtures") {
    for (const char* name : {"consistent_explicit_family.json", "markov_scenario_family.json",
                             "markov_evaluator_family.json", "gaussian_family.json"}) {
        const auto r = run_cli(config("consistency", name));
        CHECK_MESSAGE(r.code == cli::kPass, name, " ", r.err);
        CHECK(r.out.find("v1,") != std::string::npos);
    }
}

TEST_CASE("scenario-set method on an evaluator family is an input error") {
    const auto path = scratch("evaluator_dual.json");
    auto doc = json::parse(slurp(fixture("markov_evaluator_family.json")));
    doc["method"] = "scenario_sets";
    std::ofstream(path) << doc.dump();
    cli::RunConfig c = config("consistency");
    c.input = path.string();
    const auto r = run_cli(c);
    CHECK(r.code == cli::kInputError);
    CHECK(r.err.find("'/method'") != std::string::npos);
}

TEST_CASE("extend reproduces the library results") {
    const auto r = run_cli(config("extend", "extend.json"));
    REQUIRE(r.code == cli::kPass);
    const auto j = json::parse(strip_summary(r.out));
    const auto doc = parse_extend_document(slurp(fixture("extend.json")));
    const auto& space = doc.subspace.space();
    const auto hi = maximal_extension_eval(doc.subspace, RandomVariable(space, doc.queries[0].x), doc.lp_tol);
    const auto lo = minimal_extension_eval(doc.subspace, RandomVariable(space, doc.queries[1].x), doc.lp_tol);
    CHECK(j["results"][0]["value"].get<double>() == hi.value);
    CHECK(j["results"][1]["value"].get<double>() == lo.value);
    CHECK(lo.value <= hi.value);
    CHECK(j["results"][2]["converged"].get<bool>());
    CHECK(j["results"][2]["value"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("markov values match backward induction and the tensor sidecar is complete") {
    auto c = config("markov", "markov_queries.json");
    const auto prefix = scratch("tensors");
    c.tensor_prefix = prefix.string();
    const auto r = run_cli(c);
    REQUIRE(r.code == cli::kPass);

    const auto doc = parse_markov_document(slurp(fixture("markov_queries.json")));
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "schema,J,value");
    for (const auto& q : doc.queries) {
        REQUIRE(std::getline(lines, line));
        const double expected = markov_eval(doc.spec.op, doc.spec.mu0, q.j, q.f);
        const double got = std::stod(line.substr(line.rfind(',') + 1));
        CHECK(got == doctest::Approx(expected).epsilon(1e-15));
    }

    const auto side = json::parse(slurp(prefix.string() + ".json"));
    std::size_t total = 0;
    for (const auto& a : side["arrays"]) {
        std::size_t n = 1;
        for (const auto& d : a["shape"])
            n *= d.get<std::size_t>();
        CHECK(a["offset_bytes"].get<std::size_t>() == total * sizeof(double));
        total += n;
    }
    CHECK(fs::file_size(prefix.string() + ".bin") == total * sizeof(double));
}

TEST_CASE("gaussian reproduces robust_eval") {
    auto c = config("gaussian");
    c.times = {0.5, 1.0};
    c.mu_lo = -0.2;
    c.mu_hi = 0.3;
    c.sigma_lo = 0.4;
    c.sigma_hi = 0.9;
    c.function = "cos_last";
    const auto r = run_cli(c);
    REQUIRE(r.code == cli::kPass);
    const auto j = json::parse(strip_summary(r.out));
    const auto lib = robust_eval(TimeGrid({0.5, 1.0}, 1.0), named_function("cos_last", 2),
                                 ParamBox{-0.2, 0.3, 0.4, 0.9}, RobustOptions{20, 9, true});
    CHECK(j["value"].get<double>() == lib.value);
    CHECK(j["argmax_mu"].get<std::vector<double>>() == lib.mu);
    CHECK(j["argmax_sigma"].get<std::vector<double>>() == lib.sigma);
    CHECK(j["est_error"].get<double>() == lib.est_error());
}

TEST_CASE("gaussian accepts a polynomial file") {
    auto c = config("gaussian");
    c.times = {1.0};
    c.mu_lo = -0.5;
    c.mu_hi = 0.5;
    c.sigma_lo = 0.5;
    c.sigma_hi = 1.0;
    c.poly_path = fixture("cubic.json");
    const auto r = run_cli(c);
    REQUIRE(r.code == cli::kPass);
    // E[X^3 - X/2] for X ~ N(m, s^2) is m^3 + 3 m s^2 - m/2, largest at m = 0.5, s = 1.
    const auto j = json::parse(strip_summary(r.out));
    CHECK(j["value"].get<double>() == doctest::Approx(0.125 + 1.5 - 0.25).epsilon(1e-12));
}

TEST_CASE("output files are byte-identical across runs with the same seed") {
    for (const char* cmd : {"axioms", "consistency"}) {
        auto c = config(cmd, std::string(cmd) == "axioms" ? "penalty_model.json" : "markov_evaluator_family.json");
        c.seed = 42;
        c.output = scratch("a.out").string();
        run_cli(c);
        const auto first = slurp(c.output);
        c.output = scratch("b.out").string();
        run_cli(c);
        CHECK(first == slurp(c.output));
        CHECK_FALSE(first.empty());
    }
}
