#include "robustexp/continuity.hpp"

#include "robustexp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace robustexp {

namespace {

void require_decreasing(const RVSequence& s) {
    if (s.direction() != Direction::decreasing)
        throw ArgumentError("continuity check: sequences must be decreasing");
}

void note(ContinuityReport& r, double gap, double tol, ContinuityWitness w) {
    r.worst_gap = std::max(r.worst_gap, gap);
    if (gap > tol && r.pass) {
        r.pass = false;
        w.gap = gap;
        r.witness = w;
    }
}

} // namespace

ContinuityReport continuity_from_above_check(const PenaltyModel& pm, std::span<const RVSequence> seqs, double tol,
                                             std::size_t terms) {
    if (terms == 0)
        throw ArgumentError("continuity_from_above_check: terms must be positive");
    ContinuityReport r;
    for (std::size_t s = 0; s < seqs.size(); ++s) {
        require_decreasing(seqs[s]);
        const auto last = seqs[s].term(terms - 1);
        const auto lim = seqs[s].limit().value_or(last);
        require_same_space(pm.space(), last.space(), "continuity_from_above_check");
        for (std::size_t k = 0; k < pm.size(); ++k) {
            const auto& mu = pm.scenarios()[k];
            note(r, std::abs(mu.expect(last.values()) - mu.expect(lim.values())), tol, {s, k, terms - 1, 0.0});
        }
    }
    return r;
}

ContinuityReport continuity_from_above_check(const ExpectationModel& model, std::span<const RVSequence> seqs,
                                             double tol, std::size_t terms) {
    if (terms == 0)
        throw ArgumentError("continuity_from_above_check: terms must be positive");
    ContinuityReport r;
    for (std::size_t s = 0; s < seqs.size(); ++s) {
        require_decreasing(seqs[s]);
        const auto last = seqs[s].term(terms - 1);
        const auto lim = seqs[s].limit().value_or(last);
        note(r, std::abs(model.evaluate(last) - model.evaluate(lim)), tol, {s, std::nullopt, terms - 1, 0.0});
    }
    return r;
}

TightnessReport tightness_continuity_check(const std::vector<Scenario>& scenarios, const std::vector<Window>& compacts,
                                           std::span<const RVSequence> seqs, double tol, std::size_t terms) {
    if (scenarios.empty() || compacts.empty() || terms == 0)
        throw ArgumentError("tightness_continuity_check: empty input");
    const std::size_t n = scenarios.front().size();
    for (const auto& s : scenarios)
        require_same_space(scenarios.front().space(), s.space(), "tightness_continuity_check");
    for (std::size_t w = 0; w < compacts.size(); ++w) {
        if (compacts[w].lo > compacts[w].hi || compacts[w].hi >= n)
            throw ArgumentError("tightness_continuity_check: window out of range");
        if (w > 0 && (compacts[w].lo > compacts[w - 1].lo || compacts[w].hi < compacts[w - 1].hi))
            throw ArgumentError("tightness_continuity_check: windows are not nested");
    }

    TightnessReport r;
    for (const auto& win : compacts) {
        double worst = 0.0;
        for (const auto& mu : scenarios) {
            double inside = 0.0;
            for (std::size_t i = win.lo; i <= win.hi; ++i)
                inside += mu[i];
            worst = std::max(worst, std::max(0.0, 1.0 - inside));
        }
        r.outside_mass.push_back(worst);
    }
    if (r.outside_mass.back() > tol)
        r.pass = false;

    const auto& last_win = compacts.back();
    for (const auto& seq : seqs) {
        require_decreasing(seq);
        const auto x = seq.term(terms - 1);
        require_same_space(scenarios.front().space(), x.space(), "tightness_continuity_check");
        double sup = -1e300;
        for (const auto& mu : scenarios)
            sup = std::max(sup, mu.expect(x.values()));
        double inside = 0.0;
        for (std::size_t i = last_win.lo; i <= last_win.hi; ++i)
            inside = std::max(inside, std::abs(x[i]));
        r.sup_expectation.push_back(sup);
        r.inside_sup.push_back(inside);
        if (sup > tol)
            r.pass = false;
    }
    return r;
}

} // namespace robustexp
