#include "robustexp/pushforward.hpp"

#include "robustexp/errors.hpp"

namespace robustexp {

namespace {

void check_map(const StateMap& map, std::size_t source, std::size_t target) {
    if (map.size() != source)
        throw DimensionError("state map length differs from the source space size");
    for (std::size_t t : map)
        if (t >= target)
            throw DomainError("state map image lies outside the target space");
}

} // namespace

RandomVariable pull_back(const RandomVariable& y, const StateMap& map, const StateSpace& source) {
    check_map(map, source.size(), y.size());
    std::vector<double> v(map.size());
    for (std::size_t i = 0; i < map.size(); ++i)
        v[i] = y[map[i]];
    return {source, std::move(v)};
}

Scenario push_scenario(const Scenario& mu, const StateMap& map, const StateSpace& target) {
    check_map(map, mu.size(), target.size());
    std::vector<double> w(target.size(), 0.0);
    for (std::size_t i = 0; i < map.size(); ++i)
        w[map[i]] += mu[i];
    return {target, std::move(w)};
}

ExpectationModel pushforward(const ExpectationModel& model, const StateMap& map, const StateSpace& target) {
    check_map(map, model.space().size(), target.size());
    if (const auto* pm = model.penalty()) {
        std::vector<Scenario> pushed;
        pushed.reserve(pm->size());
        for (const auto& s : pm->scenarios())
            pushed.push_back(push_scenario(s, map, target));
        return deduplicate(PenaltyModel(std::move(pushed), pm->penalties()));
    }
    auto fn = [model, map](std::span<const double> y) {
        std::vector<double> x(map.size());
        for (std::size_t i = 0; i < map.size(); ++i)
            x[i] = y[map[i]];
        return model.evaluate(x);
    };
    return ExpectationModel::oracle(target, std::move(fn), "pushforward of " + model.description());
}

} // namespace robustexp
