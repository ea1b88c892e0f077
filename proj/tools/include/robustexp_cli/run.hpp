#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace robustexp::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kInputError = 2 };

struct RunConfig {
    /// axioms, extend, consistency, markov, gaussian or demo-gap.
    std::string command;
    std::string input;
    /// Empty writes the result to the log stream.
    std::string output;
    std::uint64_t seed = 0;
    std::optional<double> tol;
    std::size_t probes = 16;

    // markov
    std::string tensor_prefix;

    // gaussian
    std::vector<double> times;
    std::optional<double> horizon;
    double mu_lo = 0.0, mu_hi = 0.0, sigma_lo = 1.0, sigma_hi = 1.0;
    std::size_t order = 20;
    std::size_t grid = 9;
    bool refine = true;
    std::string function = "last";
    std::string poly_path;

    // demo-gap
    std::size_t depth = 16;
    std::string y;
};

/// Runs one command. Results go to config.output (or `log` when empty); a
/// one-line summary goes to `log`, diagnostics to `err`.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

} // namespace robustexp::cli
