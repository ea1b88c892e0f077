#pragma once

#include "robustexp/consistency.hpp"
#include "robustexp/extension.hpp"
#include "robustexp/gaussian.hpp"
#include "robustexp/kernel.hpp"
#include "robustexp/markov_chain.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace robustexp {

/*
 * Model-definition documents (JSON, schema "v1"). Every parser throws
 * DocumentError naming the line (syntax errors) or the JSON pointer of the
 * offending field. A "schema" member, when present, must be "v1".
 *
 * model:     {"space": [labels], "kind": "penalty" | "entropic",
 *             "scenarios": [[w...]...], "penalties": [a...], "p": [...], "theta": t}
 * operator:  {"matrices": [[[...]...]...], "penalties": [...]}
 *            or {"entropic_rows": {"p": [[...]...], "theta": t}}
 * family:    {"type": "markov", "space", "operator", "mu0": model without
 *             "space", "horizon", "form": "evaluator" | "scenario", "cap"}
 *            {"type": "explicit", "space", "entries": [{"J": [...], model...}]}
 *            {"type": "gaussian", "box": {"mu_lo", "mu_hi", "sigma_lo", "sigma_hi"},
 *             "horizon", "order", "grid", "refine", "checks": [{"J", "K", "f"}]}
 */

ExpectationModel parse_model_document(std::string_view text);

struct ExtendQuery {
    enum class Op { maximal, minimal, delta } op = Op::maximal;
    std::vector<double> x;
    std::vector<std::vector<double>> terms;
    std::optional<std::vector<double>> limit;
    double tol = 1e-9;
    std::size_t max_terms = 64;
};

/// {"model": model, "basis": [[...]...], "lp_tol": 1e-9, "queries": [...]}
struct ExtendDocument {
    SubspaceModel subspace;
    double lp_tol = kDefaultLpTol;
    std::vector<ExtendQuery> queries;
};

ExtendDocument parse_extend_document(std::string_view text);

struct MarkovSpec {
    OneStepOperator op;
    ExpectationModel mu0;
    std::size_t horizon;
    FamilyForm form;
    std::size_t cap;
};

struct GaussianCheck {
    std::vector<double> j;
    std::vector<double> k;
    std::string function;
};

struct GaussianSpec {
    GaussianFamily family;
    std::vector<GaussianCheck> checks;
};

struct FamilyDocument {
    std::string type;
    /// Set for "markov" and "explicit".
    std::optional<MarginalFamily> family;
    std::optional<MarkovSpec> markov;
    std::optional<GaussianSpec> gaussian;
    /// Pairs to check. For explicit families without a "pairs" field, every
    /// (J, K) with both entries present; for Markov families, empty means
    /// all subsets within the horizon.
    std::vector<SubsetPair> pairs;
    /// "expectations", "scenario_sets" or "both". Defaults to "both" when
    /// every entry has a scenario list, else "expectations".
    std::string method;
};

/// {"family": family, "pairs": [{"J": [...], "K": [...]}], "method": "..."}
FamilyDocument parse_consistency_document(std::string_view text);

struct MarkovQuery {
    FiniteSubset j;
    std::vector<double> f;
};

/// {"family": markov family, "queries": [{"J": [...], "f": [...]}]}
struct MarkovDocument {
    MarkovSpec spec;
    MarginalFamily family;
    std::vector<MarkovQuery> queries;
};

MarkovDocument parse_markov_document(std::string_view text);

/// {"arity": n, "terms": [{"coef": c, "powers": [...]}]}
Polynomial parse_polynomial_document(std::string_view text);

} // namespace robustexp
