#include "robustexp_cli/run.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    using robustexp::cli::RunConfig;
    RunConfig cfg;
    CLI::App app{"Nonlinear expectations: axioms, extensions, consistent families, Markov chains"};
    app.require_subcommand(1);

    auto common = [&cfg](CLI::App* sub) {
        sub->add_option("--input,-i", cfg.input, "Model-definition document (JSON)");
        sub->add_option("--output,-o", cfg.output, "Result file; stdout when omitted");
        sub->add_option("--seed", cfg.seed, "Seed for randomized probes");
        sub->add_option("--tol", cfg.tol, "Tolerance");
        sub->add_option("--probes", cfg.probes, "Random probes (or samples for axioms)");
    };

    auto* axioms = app.add_subcommand("axioms", "Check the expectation axioms of a model");
    auto* extend = app.add_subcommand("extend", "Maximal, minimal and delta extensions");
    auto* consistency = app.add_subcommand("consistency", "Consistency of a marginal family");
    auto* markov = app.add_subcommand("markov", "Evaluate a Markov chain family");
    auto* gaussian = app.add_subcommand("gaussian", "Drift/volatility uncertainty expectation");
    auto* gap = app.add_subcommand("demo-gap", "Maximal vs bar extension on the Dirac binary family");
    for (auto* sub : {axioms, extend, consistency, markov, gaussian, gap})
        common(sub);

    markov->add_option("--tensor", cfg.tensor_prefix, "Write PREFIX.bin and PREFIX.json with the backward-induction tensors");

    gaussian->add_option("--times", cfg.times, "Observation times t_1 < ... < t_n (n <= 4)")->delimiter(',')->required();
    gaussian->add_option("--horizon", cfg.horizon, "T (default: last time)");
    gaussian->add_option("--mu-lo", cfg.mu_lo);
    gaussian->add_option("--mu-hi", cfg.mu_hi);
    gaussian->add_option("--sigma-lo", cfg.sigma_lo);
    gaussian->add_option("--sigma-hi", cfg.sigma_hi);
    gaussian->add_option("--order", cfg.order, "Gauss-Hermite nodes per increment");
    gaussian->add_option("--grid", cfg.grid, "Grid points per parameter axis");
    gaussian->add_option("--refine", cfg.refine, "Coordinate-ascent refinement (true/false)");
    gaussian->add_option("--function", cfg.function, "Registered function: one, first, last, last_sq, cos_last, sum, max, positive_last");
    gaussian->add_option("--poly", cfg.poly_path, "Polynomial coefficient file (JSON)");

    gap->add_option("--depth", cfg.depth, "Largest n (1..16)");
    gap->add_option("--y", cfg.y, "Path y as a 0/1 string (default: drawn from --seed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return robustexp::cli::kInputError;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    return robustexp::cli::run(cfg, std::cout, std::cerr);
}
