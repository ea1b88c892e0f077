#include "robustexp/expectation.hpp"

#include "robustexp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <variant>

namespace robustexp {

PenaltyModel::PenaltyModel(std::vector<Scenario> scenarios, std::vector<double> penalties)
    : scenarios_(std::move(scenarios)), penalties_(std::move(penalties)) {
    if (scenarios_.empty())
        throw ArgumentError("PenaltyModel: at least one scenario is required");
    if (penalties_.size() != scenarios_.size())
        throw DimensionError("PenaltyModel: one penalty per scenario is required");
    for (const auto& s : scenarios_)
        require_same_space(s.space(), scenarios_.front().space(), "PenaltyModel");
    double lowest = penalties_.front();
    for (double a : penalties_) {
        if (!std::isfinite(a) || a < 0.0)
            throw DomainError("PenaltyModel: penalties must be finite and nonnegative");
        lowest = std::min(lowest, a);
    }
    if (lowest != 0.0)
        throw DomainError("PenaltyModel: the smallest penalty must be 0 (constant preservation)");
}

PenaltyModel PenaltyModel::sublinear(std::vector<Scenario> scenarios) {
    std::vector<double> zeros(scenarios.size(), 0.0);
    return PenaltyModel(std::move(scenarios), std::move(zeros));
}

PenaltyModel PenaltyModel::linear(Scenario scenario) {
    return sublinear(std::vector<Scenario>{std::move(scenario)});
}

bool PenaltyModel::is_sublinear() const noexcept {
    return std::all_of(penalties_.begin(), penalties_.end(), [](double a) { return a == 0.0; });
}

DualValue dual_eval(const PenaltyModel& pm, std::span<const double> x) {
    if (x.size() != pm.space().size())
        throw DimensionError("dual_eval: length mismatch");
    // Shift by min(x) so that constants evaluate exactly: each term becomes
    // mu_k (x - c) - alpha_k and the constant part is added back once.
    const double c = *std::min_element(x.begin(), x.end());
    DualValue best{-std::numeric_limits<double>::infinity(), 0};
    for (std::size_t k = 0; k < pm.size(); ++k) {
        const auto w = pm.scenarios()[k].weights();
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            s += w[i] * (x[i] - c);
        s -= pm.penalties()[k];
        if (s > best.value) {
            best.value = s;
            best.argmax = k;
        }
    }
    best.value += c;
    return best;
}

DualValue dual_eval(const PenaltyModel& pm, const RandomVariable& x) {
    require_same_space(pm.space(), x.space(), "dual_eval");
    return dual_eval(pm, x.values());
}

EntropicModel::EntropicModel(Scenario ref, double th) : reference(std::move(ref)), theta(th) {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw DomainError("EntropicModel: theta must be positive and finite");
}

double entropic_eval(const EntropicModel& m, std::span<const double> x) {
    const auto p = m.reference.weights();
    if (x.size() != p.size())
        throw DimensionError("entropic_eval: length mismatch");
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (p[i] > 0.0)
            top = std::max(top, x[i]);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (p[i] > 0.0)
            s += p[i] * std::exp(m.theta * (x[i] - top));
    return top + std::log(s) / m.theta;
}

const char* to_string(ModelKind k) noexcept {
    switch (k) {
    case ModelKind::penalty_dual: return "penalty";
    case ModelKind::entropic: return "entropic";
    case ModelKind::oracle: return "oracle";
    }
    return "unknown";
}

struct OracleModel {
    StateSpace space;
    Evaluator fn;
};

struct ExpectationModel::Impl {
    std::variant<PenaltyModel, EntropicModel, OracleModel> body;
    std::string description;
};

ExpectationModel::ExpectationModel(PenaltyModel pm)
    : impl_(std::make_shared<Impl>(Impl{std::move(pm), "penalty"})) {}

ExpectationModel::ExpectationModel(EntropicModel em)
    : impl_(std::make_shared<Impl>(Impl{std::move(em), "entropic"})) {}

ExpectationModel ExpectationModel::oracle(StateSpace space, Evaluator fn, std::string description) {
    if (!fn)
        throw ArgumentError("ExpectationModel::oracle: empty evaluator");
    return ExpectationModel(std::make_shared<Impl>(
        Impl{OracleModel{std::move(space), std::move(fn)},
             description.empty() ? std::string("oracle") : std::move(description)}));
}

ModelKind ExpectationModel::kind() const noexcept {
    return static_cast<ModelKind>(impl_->body.index());
}

const StateSpace& ExpectationModel::space() const noexcept {
    return std::visit(
        [](const auto& b) -> const StateSpace& {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, PenaltyModel>)
                return b.space();
            else if constexpr (std::is_same_v<T, EntropicModel>)
                return b.reference.space();
            else
                return b.space;
        },
        impl_->body);
}

const std::string& ExpectationModel::description() const noexcept { return impl_->description; }

const PenaltyModel* ExpectationModel::penalty() const noexcept {
    return std::get_if<PenaltyModel>(&impl_->body);
}

const EntropicModel* ExpectationModel::entropic() const noexcept {
    return std::get_if<EntropicModel>(&impl_->body);
}

double ExpectationModel::evaluate(std::span<const double> x) const {
    if (x.size() != space().size())
        throw DimensionError("evaluate: length does not match the model's space");
    require_finite(x, "evaluate");
    return std::visit(
        [&](const auto& b) -> double {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, PenaltyModel>)
                return dual_eval(b, x).value;
            else if constexpr (std::is_same_v<T, EntropicModel>)
                return entropic_eval(b, x);
            else
                return b.fn(x);
        },
        impl_->body);
}

double ExpectationModel::evaluate(const RandomVariable& x) const {
    require_same_space(space(), x.space(), "evaluate");
    return evaluate(x.values());
}

double evaluate(const ExpectationModel& model, const RandomVariable& x) { return model.evaluate(x); }

std::vector<long long> canonical_key(std::span<const double> v) {
    std::vector<long long> key(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        key[i] = std::llround(v[i] * 1e12);
    return key;
}

PenaltyModel deduplicate(const PenaltyModel& pm) {
    std::map<std::vector<long long>, std::size_t> seen;
    std::vector<Scenario> scen;
    std::vector<double> pen;
    for (std::size_t k = 0; k < pm.size(); ++k) {
        auto key = canonical_key(pm.scenarios()[k].weights());
        auto [it, inserted] = seen.emplace(std::move(key), scen.size());
        if (inserted) {
            scen.push_back(pm.scenarios()[k]);
            pen.push_back(pm.penalties()[k]);
        } else {
            pen[it->second] = std::min(pen[it->second], pm.penalties()[k]);
        }
    }
    return PenaltyModel(std::move(scen), std::move(pen));
}

} // namespace robustexp
