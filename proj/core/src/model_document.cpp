#include "robustexp/model_document.hpp"

#include "robustexp/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace robustexp {

namespace {

using nlohmann::json;

class Node {
  public:
    Node(const json& value, std::string path) : v_(&value), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }
    const json& raw() const noexcept { return *v_; }
    [[noreturn]] void fail(const std::string& message) const { throw DocumentError(path_.empty() ? "/" : path_, 0, message); }

    bool has(const char* key) const { return v_->is_object() && v_->contains(key); }
    Node at(const char* key) const {
        if (!v_->is_object())
            fail("expected an object");
        if (!v_->contains(key))
            throw DocumentError(path_ + "/" + key, 0, "missing required field");
        return {(*v_)[key], path_ + "/" + key};
    }
    std::vector<Node> items() const {
        if (!v_->is_array())
            fail("expected an array");
        std::vector<Node> out;
        for (std::size_t i = 0; i < v_->size(); ++i)
            out.emplace_back((*v_)[i], path_ + "/" + std::to_string(i));
        return out;
    }
    double number() const {
        if (!v_->is_number())
            fail("expected a number");
        const double d = v_->get<double>();
        if (!std::isfinite(d))
            fail("expected a finite number");
        return d;
    }
    std::size_t count() const {
        if (!v_->is_number_integer() || v_->get<long long>() < 0)
            fail("expected a nonnegative integer");
        return v_->get<std::size_t>();
    }
    Index index() const { return static_cast<Index>(count()); }
    bool boolean() const {
        if (!v_->is_boolean())
            fail("expected true or false");
        return v_->get<bool>();
    }
    std::string string() const {
        if (!v_->is_string())
            fail("expected a string");
        return v_->get<std::string>();
    }
    std::vector<double> vec() const {
        std::vector<double> out;
        for (const auto& n : items())
            out.push_back(n.number());
        return out;
    }
    std::vector<std::vector<double>> mat() const {
        std::vector<std::vector<double>> out;
        for (const auto& n : items())
            out.push_back(n.vec());
        return out;
    }
    std::vector<std::string> strings() const {
        std::vector<std::string> out;
        for (const auto& n : items())
            out.push_back(n.string());
        return out;
    }
    FiniteSubset subset() const {
        FiniteSubset j;
        for (const auto& n : items())
            j.push_back(n.index());
        return guard([&] { return make_subset(j); });
    }

    /// Runs fn, reporting library errors against this node.
    template <class Fn>
    auto guard(Fn&& fn) const -> decltype(fn()) {
        try {
            return fn();
        } catch (const DocumentError&) {
            throw;
        } catch (const Error& e) {
            fail(e.what());
        }
    }

  private:
    const json* v_;
    std::string path_;
};

json parse_text(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
        std::string msg = e.what();
        const auto pos = msg.find("syntax error");
        throw DocumentError("", line, pos == std::string::npos ? msg : msg.substr(pos));
    }
}

void check_schema(const Node& root) {
    if (!root.raw().is_object())
        root.fail("expected an object");
    if (root.has("schema") && root.at("schema").string() != "v1")
        root.at("schema").fail("unsupported schema (expected \"v1\")");
}

StateSpace parse_space(const Node& n) {
    auto labels = n.strings();
    return n.guard([&] { return StateSpace(std::move(labels)); });
}

ExpectationModel parse_model_on(const Node& n, const StateSpace& space) {
    const std::string kind = n.has("kind") ? n.at("kind").string() : (n.has("theta") ? "entropic" : "penalty");
    if (kind == "penalty") {
        const auto sc = n.at("scenarios");
        std::vector<Scenario> scenarios;
        for (const auto& s : sc.items()) {
            auto w = s.vec();
            scenarios.push_back(s.guard([&] { return Scenario(space, std::move(w)); }));
        }
        if (scenarios.empty())
            sc.fail("at least one scenario is required");
        std::vector<double> pen(scenarios.size(), 0.0);
        if (n.has("penalties")) {
            pen = n.at("penalties").vec();
            if (pen.size() != scenarios.size())
                n.at("penalties").fail("one penalty per scenario is required");
        }
        return n.guard([&] { return ExpectationModel(PenaltyModel(std::move(scenarios), std::move(pen))); });
    }
    if (kind == "entropic") {
        const auto p = n.at("p");
        auto w = p.vec();
        const Scenario ref = p.guard([&] { return Scenario(space, std::move(w)); });
        const auto th = n.at("theta");
        const double theta = th.number();
        return th.guard([&] { return ExpectationModel(EntropicModel(ref, theta)); });
    }
    n.at("kind").fail("expected \"penalty\" or \"entropic\"");
}

ExpectationModel parse_model_node(const Node& n) { return parse_model_on(n, parse_space(n.at("space"))); }

OneStepOperator parse_operator(const Node& n, const StateSpace& space) {
    if (n.has("entropic_rows")) {
        const auto e = n.at("entropic_rows");
        auto p = e.at("p").mat();
        const double theta = e.at("theta").number();
        return e.guard([&] { return OneStepOperator::entropic(space, std::move(p), theta); });
    }
    const auto m = n.at("matrices");
    std::vector<Matrix> mats;
    for (const auto& a : m.items())
        mats.push_back(a.mat());
    if (mats.empty())
        m.fail("at least one matrix is required");
    std::vector<double> pen;
    if (n.has("penalties")) {
        pen = n.at("penalties").vec();
        if (pen.size() != mats.size())
            n.at("penalties").fail("one penalty per matrix is required");
    }
    const bool sublinear = std::all_of(pen.begin(), pen.end(), [](double a) { return a == 0.0; });
    return m.guard([&] {
        if (!sublinear)
            return OneStepOperator::convex(space, std::move(mats), std::move(pen));
        if (mats.size() == 1)
            return OneStepOperator::linear(space, std::move(mats.front()));
        return OneStepOperator::sublinear(space, std::move(mats));
    });
}

MarkovSpec parse_markov_spec(const Node& n) {
    const auto space = parse_space(n.at("space"));
    auto op = parse_operator(n.at("operator"), space);
    auto mu0 = parse_model_on(n.at("mu0"), space);
    const std::size_t horizon = n.at("horizon").count();
    FamilyForm form = FamilyForm::evaluator;
    if (n.has("form")) {
        const auto f = n.at("form").string();
        if (f == "scenario")
            form = FamilyForm::scenario;
        else if (f != "evaluator")
            n.at("form").fail("expected \"evaluator\" or \"scenario\"");
    }
    const std::size_t cap = n.has("cap") ? n.at("cap").count() : kScenarioCap;
    return MarkovSpec{std::move(op), std::move(mu0), horizon, form, cap};
}

MarginalFamily markov_family_of(const Node& n, const MarkovSpec& s) {
    return n.guard([&] { return markov_chain_family(s.op, s.mu0, s.horizon, s.form, s.cap); });
}

ParamBox parse_box(const Node& n) {
    ParamBox b{n.at("mu_lo").number(), n.at("mu_hi").number(), n.at("sigma_lo").number(), n.at("sigma_hi").number()};
    n.guard([&] {
        b.validate();
        return 0;
    });
    return b;
}

} // namespace

ExpectationModel parse_model_document(std::string_view text) {
    const json doc = parse_text(text);
    const Node root(doc, "");
    check_schema(root);
    return parse_model_node(root);
}

ExtendDocument parse_extend_document(std::string_view text) {
    const json doc = parse_text(text);
    const Node root(doc, "");
    check_schema(root);
    const auto model = parse_model_node(root.at("model"));
    const auto& space = model.space();
    const auto b = root.at("basis");
    std::vector<RandomVariable> basis;
    for (const auto& v : b.items()) {
        auto x = v.vec();
        basis.push_back(v.guard([&] { return RandomVariable(space, std::move(x)); }));
    }
    ExtendDocument out{b.guard([&] { return SubspaceModel(std::move(basis), model); }), kDefaultLpTol, {}};
    if (root.has("lp_tol")) {
        out.lp_tol = root.at("lp_tol").number();
        if (!(out.lp_tol > 0.0))
            root.at("lp_tol").fail("expected a positive tolerance");
    }
    for (const auto& q : root.at("queries").items()) {
        ExtendQuery e;
        const auto op = q.at("op").string();
        auto check_len = [&](const Node& n, const std::vector<double>& v) {
            if (v.size() != space.size())
                n.fail("length does not match the state space");
        };
        if (op == "maximal" || op == "minimal") {
            e.op = op == "maximal" ? ExtendQuery::Op::maximal : ExtendQuery::Op::minimal;
            e.x = q.at("x").vec();
            check_len(q.at("x"), e.x);
        } else if (op == "delta") {
            e.op = ExtendQuery::Op::delta;
            e.terms = q.at("terms").mat();
            if (e.terms.empty())
                q.at("terms").fail("at least one term is required");
            for (std::size_t i = 0; i < e.terms.size(); ++i)
                check_len(q.at("terms").items()[i], e.terms[i]);
            if (q.has("limit")) {
                e.limit = q.at("limit").vec();
                check_len(q.at("limit"), *e.limit);
            }
            if (q.has("tol"))
                e.tol = q.at("tol").number();
            if (q.has("max_terms"))
                e.max_terms = q.at("max_terms").count();
        } else {
            q.at("op").fail("expected \"maximal\", \"minimal\" or \"delta\"");
        }
        out.queries.push_back(std::move(e));
    }
    return out;
}

FamilyDocument parse_consistency_document(std::string_view text) {
    const json doc = parse_text(text);
    const Node root(doc, "");
    check_schema(root);
    const auto fam = root.at("family");
    FamilyDocument out;
    out.type = fam.at("type").string();
    bool all_penalty = false;
    std::vector<FiniteSubset> entry_sets;
    if (out.type == "markov") {
        out.markov = parse_markov_spec(fam);
        out.family = markov_family_of(fam, *out.markov);
    } else if (out.type == "explicit") {
        const auto space = parse_space(fam.at("space"));
        std::map<FiniteSubset, ExpectationModel> entries;
        all_penalty = true;
        const auto list = fam.at("entries");
        for (const auto& e : list.items()) {
            const auto j = e.at("J").subset();
            const auto sp = e.guard([&] { return product_space(space, j); });
            auto model = parse_model_on(e, sp);
            all_penalty = all_penalty && model.kind() == ModelKind::penalty_dual;
            if (!entries.emplace(j, std::move(model)).second)
                e.at("J").fail("duplicate entry");
        }
        if (entries.empty())
            list.fail("at least one entry is required");
        for (const auto& [j, model] : entries)
            entry_sets.push_back(j);
        out.family = list.guard([&] { return MarginalFamily::explicit_entries(space, std::move(entries), "explicit"); });
    } else if (out.type == "gaussian") {
        const auto box = parse_box(fam.at("box"));
        RobustOptions opt;
        if (fam.has("order"))
            opt.order = fam.at("order").count();
        if (fam.has("grid"))
            opt.grid_per_axis = fam.at("grid").count();
        if (fam.has("refine"))
            opt.refine = fam.at("refine").boolean();
        const double horizon = fam.at("horizon").number();
        auto family = fam.guard([&] { return GaussianFamily(box, horizon, opt); });
        std::vector<GaussianCheck> checks;
        for (const auto& c : fam.at("checks").items()) {
            GaussianCheck g{c.at("J").vec(), c.at("K").vec(), c.at("f").string()};
            c.guard([&] {
                TimeGrid(g.j, horizon);
                return named_function(g.function, g.k.size());
            });
            checks.push_back(std::move(g));
        }
        out.gaussian = GaussianSpec{std::move(family), std::move(checks)};
    } else {
        fam.at("type").fail("expected \"markov\", \"explicit\" or \"gaussian\"");
    }
    if (root.has("pairs")) {
        for (const auto& p : root.at("pairs").items()) {
            auto j = p.at("J").subset();
            auto k = p.at("K").subset();
            if (!is_subset(k, j) || k == j || k.empty())
                p.fail("K must be a nonempty proper subset of J");
            out.pairs.emplace_back(std::move(j), std::move(k));
        }
    }
    if (out.pairs.empty()) {
        for (auto& [j, k] : all_pairs(entry_sets))
            if (std::binary_search(entry_sets.begin(), entry_sets.end(), k))
                out.pairs.emplace_back(std::move(j), std::move(k));
    }
    const bool has_scenarios = all_penalty || (out.markov && out.markov->form == FamilyForm::scenario);
    out.method = has_scenarios ? "both" : "expectations";
    if (root.has("method")) {
        const auto m = root.at("method");
        out.method = m.string();
        if (out.method != "expectations" && out.method != "scenario_sets" && out.method != "both")
            m.fail("expected \"expectations\", \"scenario_sets\" or \"both\"");
        if (out.method != "expectations" && !has_scenarios)
            m.fail("this family has no scenario lists; use \"expectations\"");
    }
    return out;
}

MarkovDocument parse_markov_document(std::string_view text) {
    const json doc = parse_text(text);
    const Node root(doc, "");
    check_schema(root);
    const auto fam = root.at("family");
    if (fam.at("type").string() != "markov")
        fam.at("type").fail("expected \"markov\"");
    auto spec = parse_markov_spec(fam);
    auto family = markov_family_of(fam, spec);
    MarkovDocument out{std::move(spec), std::move(family), {}};
    const std::size_t n = out.spec.op.space().size();
    for (const auto& q : root.at("queries").items()) {
        MarkovQuery m{q.at("J").subset(), q.at("f").vec()};
        if (m.j.back() > static_cast<Index>(out.spec.horizon))
            q.at("J").fail("coordinates beyond the horizon");
        std::size_t expected = 1;
        for (std::size_t i = 0; i < m.j.size(); ++i)
            expected *= n;
        if (m.f.size() != expected)
            q.at("f").fail("expected " + std::to_string(expected) + " values (|S|^|J|, row-major)");
        out.queries.push_back(std::move(m));
    }
    return out;
}

Polynomial parse_polynomial_document(std::string_view text) {
    const json doc = parse_text(text);
    const Node root(doc, "");
    check_schema(root);
    const std::size_t arity = root.at("arity").count();
    std::vector<Monomial> terms;
    for (const auto& t : root.at("terms").items()) {
        Monomial m{t.at("coef").number(), {}};
        for (const auto& p : t.at("powers").items())
            m.powers.push_back(static_cast<unsigned>(p.count()));
        terms.push_back(std::move(m));
    }
    return root.guard([&] { return Polynomial(arity, std::move(terms)); });
}

} // namespace robustexp
