#include "robustexp_cli/run.hpp"

#include "robustexp/axioms.hpp"
#include "robustexp/bar_extension.hpp"
#include "robustexp/errors.hpp"
#include "robustexp/model_document.hpp"

#include "json.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

namespace robustexp::cli {

namespace {

using nlohmann::ordered_json;

/// Signals a problem with the run's inputs (exit status 2).
struct InputProblem {
    std::string message;
};

std::string read_file(const std::string& path) {
    if (path.empty())
        throw InputProblem{"--input is required for this command"};
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputProblem{"cannot read '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_result(const RunConfig& c, const std::string& content, std::ostream& log) {
    if (c.output.empty()) {
        log << content;
        return;
    }
    std::ofstream out(c.output, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InputProblem{"cannot write '" + c.output + "'"};
    out << content;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string times_label(const std::vector<double>& t) {
    std::string out = "{";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i)
            out += ',';
        out += ordered_json(t[i]).dump();
    }
    return out + "}";
}

std::string vec_label(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ',';
        out += num(v[i]);
    }
    return out + "]";
}

std::vector<FiniteSubset> all_subsets(std::size_t horizon) {
    std::vector<FiniteSubset> out;
    const std::size_t n = horizon + 1;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        FiniteSubset j;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i))
                j.push_back(static_cast<Index>(i));
        out.push_back(j);
    }
    return out;
}

int cmd_axioms(const RunConfig& c, std::ostream& log) {
    const auto model = parse_model_document(read_file(c.input));
    const double tol = c.tol.value_or(1e-12);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::vector<RandomVariable> samples;
    for (std::size_t s = 0; s < std::max<std::size_t>(2, c.probes); ++s) {
        std::vector<double> v(model.space().size());
        for (double& x : v)
            x = u(rng);
        samples.emplace_back(model.space(), std::move(v));
    }
    const auto rep = verify_axioms(model, samples, tol);
    ordered_json out{{"schema", "v1"}, {"command", "axioms"}, {"kind", to_string(model.kind())},
                     {"samples", samples.size()}, {"seed", c.seed}, {"tol", tol}};
    ordered_json checks = ordered_json::array();
    for (const auto* ch : rep.checks())
        checks.push_back({{"name", ch->name},
                          {"passed", ch->passed},
                          {"worst_violation", ch->worst_violation},
                          {"cases", ch->cases}});
    out["checks"] = checks;
    out["convex_expectation"] = rep.convex_expectation();
    out["sublinear"] = rep.sublinear();
    out["pass"] = rep.convex_expectation();
    write_result(c, dump(out), log);
    log << "axioms: " << (rep.convex_expectation() ? "pass" : "FAIL") << (rep.sublinear() ? " (sublinear)" : "")
        << "\n";
    return rep.convex_expectation() ? kPass : kFail;
}

int cmd_extend(const RunConfig& c, std::ostream& log) {
    const auto doc = parse_extend_document(read_file(c.input));
    const auto& space = doc.subspace.space();
    ordered_json results = ordered_json::array();
    bool all_converged = true;
    for (const auto& q : doc.queries) {
        ExtensionResult r;
        const char* op = "maximal";
        if (q.op == ExtendQuery::Op::maximal) {
            r = maximal_extension_eval(doc.subspace, RandomVariable(space, q.x), doc.lp_tol);
        } else if (q.op == ExtendQuery::Op::minimal) {
            op = "minimal";
            r = minimal_extension_eval(doc.subspace, RandomVariable(space, q.x), doc.lp_tol);
        } else {
            op = "delta";
            std::vector<RandomVariable> terms;
            for (const auto& t : q.terms)
                terms.emplace_back(space, t);
            std::optional<RandomVariable> limit;
            if (q.limit)
                limit.emplace(space, *q.limit);
            const auto seq = RVSequence::from_list(Direction::decreasing, std::move(terms), std::move(limit));
            r = delta_extension_eval(doc.subspace, seq, q.tol, q.max_terms);
        }
        all_converged = all_converged && r.converged;
        ordered_json cert{{"coefficients", r.certificate.coefficients},
                          {"scenario", r.certificate.scenario ? ordered_json(*r.certificate.scenario) : ordered_json()},
                          {"terms", r.certificate.terms},
                          {"partial_values", r.certificate.partial_values}};
        results.push_back({{"op", op},
                           {"value", r.value},
                           {"converged", r.converged},
                           {"residual", r.residual},
                           {"certificate", cert}});
    }
    ordered_json out{{"schema", "v1"}, {"command", "extend"}, {"lp_tol", doc.lp_tol}, {"results", results}};
    write_result(c, dump(out), log);
    log << "extend: " << doc.queries.size() << " queries, " << (all_converged ? "all converged" : "NOT converged")
        << "\n";
    return all_converged ? kPass : kFail;
}

int cmd_consistency(const RunConfig& c, std::ostream& log, std::ostream& err) {
    const auto doc = parse_consistency_document(read_file(c.input));
    if (doc.gaussian) {
        const double tol = c.tol.value_or(1e-4);
        std::string csv = "schema,J,K,max_discrepancy,pass\n";
        bool pass = true;
        for (const auto& ch : doc.gaussian->checks) {
            const auto f = named_function(ch.function, ch.k.size());
            const auto row = check_gaussian_consistency(doc.gaussian->family, ch.j, ch.k, f, tol);
            csv += "v1,\"" + times_label(ch.j) + "\",\"" + times_label(ch.k) + "\"," + num(row.discrepancy) + "," +
                   (row.pass ? "true" : "false") + "\n";
            if (!row.pass && pass)
                err << "consistency violation: J=" << times_label(ch.j) << " K=" << times_label(ch.k)
                    << " f=" << ch.function << " discrepancy=" << num(row.discrepancy) << "\n";
            pass = pass && row.pass;
        }
        write_result(c, csv, log);
        log << "consistency: " << (pass ? "pass" : "FAIL") << " (" << doc.gaussian->checks.size() << " checks)\n";
        return pass ? kPass : kFail;
    }

    const auto& family = *doc.family;
    auto pairs = doc.pairs;
    if (pairs.empty() && doc.markov)
        pairs = all_pairs(all_subsets(doc.markov->horizon));
    const double tol = c.tol.value_or(1e-9);
    const auto rep = doc.method == "scenario_sets" ? check_consistency_scenario_sets(family, pairs, tol)
                                                   : check_consistency_expectations(family, pairs, c.probes, c.seed, tol);
    bool pass = rep.pass();
    std::string note;
    if (doc.method == "both") {
        const auto dual = check_consistency_scenario_sets(family, pairs, tol);
        if (dual.pass() != rep.pass()) {
            note = " (primal and dual verdicts disagree)";
            pass = false;
        }
    }
    write_result(c, rep.to_csv(), log);
    if (const auto* bad = rep.first_failure()) {
        err << "consistency violation: J=" << to_string(bad->j) << " K=" << to_string(bad->k)
            << " max_discrepancy=" << num(bad->max_discrepancy);
        if (bad->witness)
            err << " f=" << vec_label(*bad->witness);
        err << "\n";
    }
    log << "consistency: " << (pass ? "pass" : "FAIL") << " (" << rep.rows.size() << " pairs)" << note << "\n";
    return pass ? kPass : kFail;
}

int cmd_markov(const RunConfig& c, std::ostream& log) {
    const auto doc = parse_markov_document(read_file(c.input));
    std::string csv = "schema,J,value\n";
    ordered_json arrays = ordered_json::array();
    std::vector<double> blob;
    const std::size_t n = doc.spec.op.space().size();
    for (std::size_t qi = 0; qi < doc.queries.size(); ++qi) {
        const auto& q = doc.queries[qi];
        const double value = cylinder_eval(doc.family, CylinderFunction(q.j, RandomVariable(product_space(doc.spec.op.space(), q.j), q.f)));
        csv += "v1,\"" + to_string(q.j) + "\"," + num(value) + "\n";
        if (c.tensor_prefix.empty())
            continue;
        const auto stages = markov_stages(doc.spec.op, doc.spec.mu0, q.j, q.f);
        for (std::size_t s = 0; s < stages.size(); ++s) {
            const FiniteSubset coords(q.j.begin(), q.j.end() - static_cast<std::ptrdiff_t>(s));
            arrays.push_back({{"query", qi},
                              {"J", to_string(q.j)},
                              {"stage", s},
                              {"coordinates", coords},
                              {"shape", std::vector<std::size_t>(coords.size(), n)},
                              {"offset_bytes", blob.size() * sizeof(double)}});
            blob.insert(blob.end(), stages[s].begin(), stages[s].end());
        }
    }
    write_result(c, csv, log);
    if (!c.tensor_prefix.empty()) {
        std::ofstream bin(c.tensor_prefix + ".bin", std::ios::binary | std::ios::trunc);
        if (!bin)
            throw InputProblem{"cannot write '" + c.tensor_prefix + ".bin'"};
        bin.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size() * sizeof(double)));
        ordered_json side{{"schema", "v1"},
                          {"dtype", "float64"},
                          {"byte_order", std::endian::native == std::endian::little ? "little" : "big"},
                          {"layout", "row-major, first coordinate slowest"},
                          {"states", n},
                          {"arrays", arrays}};
        std::ofstream js(c.tensor_prefix + ".json", std::ios::binary | std::ios::trunc);
        if (!js)
            throw InputProblem{"cannot write '" + c.tensor_prefix + ".json'"};
        js << dump(side);
    }
    log << "markov: " << doc.queries.size() << " queries\n";
    return kPass;
}

int cmd_gaussian(const RunConfig& c, std::ostream& log) {
    if (c.times.empty())
        throw InputProblem{"--times is required"};
    const double horizon = c.horizon.value_or(c.times.back());
    const ParamBox box{c.mu_lo, c.mu_hi, c.sigma_lo, c.sigma_hi};
    const TimeGrid grid(c.times, horizon);
    const auto f = c.poly_path.empty() ? named_function(c.function, c.times.size())
                                       : PathFunction::polynomial(parse_polynomial_document(read_file(c.poly_path)));
    const auto r = robust_eval(grid, f, box, RobustOptions{c.order, c.grid, c.refine});
    ordered_json out{{"schema", "v1"},
                     {"command", "gaussian"},
                     {"times", c.times},
                     {"horizon", horizon},
                     {"box", {{"mu_lo", box.mu_lo}, {"mu_hi", box.mu_hi}, {"sigma_lo", box.sigma_lo}, {"sigma_hi", box.sigma_hi}}},
                     {"function", f.name()},
                     {"value", r.value},
                     {"argmax_mu", r.mu},
                     {"argmax_sigma", r.sigma},
                     {"order", c.order},
                     {"grid", c.grid},
                     {"refine", c.refine},
                     {"grid_value", r.grid_value},
                     {"quadrature_error", r.quadrature_error},
                     {"grid_error", r.grid_error},
                     {"est_error", r.est_error()}};
    write_result(c, dump(out), log);
    log << "gaussian: value=" << num(r.value) << " est_error=" << num(r.est_error()) << "\n";
    return kPass;
}

int cmd_demo_gap(const RunConfig& c, std::ostream& log) {
    std::vector<std::size_t> y;
    if (!c.y.empty()) {
        for (char ch : c.y) {
            if (ch != '0' && ch != '1')
                throw InputProblem{"--y must be a string of 0 and 1"};
            y.push_back(static_cast<std::size_t>(ch - '0'));
        }
    } else {
        std::mt19937_64 rng(c.seed);
        for (std::size_t i = 0; i <= c.depth; ++i)
            y.push_back(static_cast<std::size_t>(rng() & 1u));
    }
    const StateSpace s2({"0", "1"});
    const auto r = hat_vs_bar_gap_demo(dirac_family(s2, y), c.depth);
    const bool pass = r.hat_value == 1.0 && r.bar_limit == 0.0;
    std::string ys;
    for (auto b : r.y)
        ys += static_cast<char>('0' + b);
    ordered_json out{{"schema", "v1"},
                     {"command", "demo-gap"},
                     {"y", ys},
                     {"depth", c.depth},
                     {"hat", r.hat_value},
                     {"bar_limit", r.bar_limit},
                     {"hat_by_depth", r.hat_by_depth},
                     {"bar_terms", r.bar_terms},
                     {"lp_hat_by_depth", r.lp_hat_by_depth},
                     {"pass", pass}};
    write_result(c, dump(out), log);
    log << "hat=" << num(r.hat_value) << " bar_limit=" << num(r.bar_limit) << "\n";
    return pass ? kPass : kFail;
}

} // namespace

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
    try {
        if (config.command == "axioms")
            return cmd_axioms(config, log);
        if (config.command == "extend")
            return cmd_extend(config, log);
        if (config.command == "consistency")
            return cmd_consistency(config, log, err);
        if (config.command == "markov")
            return cmd_markov(config, log);
        if (config.command == "gaussian")
            return cmd_gaussian(config, log);
        if (config.command == "demo-gap")
            return cmd_demo_gap(config, log);
        err << "robustexp: unknown command '" << config.command << "'\n";
        return kInputError;
    } catch (const InputProblem& e) {
        err << "robustexp: " << e.message << "\n";
    } catch (const DocumentError& e) {
        err << "robustexp: " << config.input << ": " << e.what() << "\n";
    } catch (const Error& e) {
        err << "robustexp: " << e.what() << "\n";
    }
    return kInputError;
}

} // namespace robustexp::cli
