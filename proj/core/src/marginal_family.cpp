#include "robustexp/marginal_family.hpp"

#include "robustexp/errors.hpp"

#include <mutex>
#include <shared_mutex>

namespace robustexp {

struct MarginalFamily::Impl {
    explicit Impl(StateSpace b) : base(std::move(b)) {}
    StateSpace base;
    Generator generator;
    std::optional<Index> max_index;
    std::string description;
    std::optional<std::map<FiniteSubset, ExpectationModel>> fixed;

    mutable std::shared_mutex mutex;
    mutable std::map<FiniteSubset, ExpectationModel> cache;
    mutable std::map<FiniteSubset, bool> verified;
};

MarginalFamily::MarginalFamily(StateSpace base, Generator generator, std::optional<Index> max_index,
                               std::string description) {
    if (!generator)
        throw ArgumentError("MarginalFamily: empty generator");
    if (base.is_product())
        throw ArgumentError("MarginalFamily: base space must not be a product");
    impl_ = std::make_shared<Impl>(std::move(base));
    impl_->generator = std::move(generator);
    impl_->max_index = max_index;
    impl_->description = std::move(description);
}

MarginalFamily MarginalFamily::explicit_entries(StateSpace base, std::map<FiniteSubset, ExpectationModel> entries,
                                                std::string description) {
    for (const auto& [j, m] : entries) {
        if (j != make_subset(j))
            throw ArgumentError("MarginalFamily: entry keys must be sorted subsets");
        if (!(m.space() == product_space(base, j)))
            throw DimensionError("MarginalFamily: entry " + to_string(j) + " is not on S^J");
    }
    auto shared = std::make_shared<const std::map<FiniteSubset, ExpectationModel>>(entries);
    MarginalFamily fam(
        std::move(base),
        [shared](const FiniteSubset& j) {
            const auto it = shared->find(j);
            if (it == shared->end())
                throw ArgumentError("MarginalFamily: no entry for " + to_string(j));
            return it->second;
        },
        std::nullopt, std::move(description));
    fam.impl_->fixed = std::move(entries);
    return fam;
}

const StateSpace& MarginalFamily::base() const noexcept { return impl_->base; }
std::optional<Index> MarginalFamily::max_index() const noexcept { return impl_->max_index; }
const std::string& MarginalFamily::description() const noexcept { return impl_->description; }

bool MarginalFamily::has_entry(const FiniteSubset& j) const {
    if (j.empty() || j != make_subset(j) || j.front() < 0)
        return false;
    if (impl_->fixed)
        return impl_->fixed->count(j) > 0;
    return !impl_->max_index || j.back() <= *impl_->max_index;
}

ExpectationModel MarginalFamily::entry(const FiniteSubset& j) const {
    if (!has_entry(j))
        throw ArgumentError("MarginalFamily: no entry for " + to_string(j));
    {
        std::shared_lock lock(impl_->mutex);
        const auto it = impl_->cache.find(j);
        if (it != impl_->cache.end())
            return it->second;
    }
    auto model = impl_->generator(j);
    if (!(model.space() == product_space(impl_->base, j)))
        throw DimensionError("MarginalFamily: generated entry " + to_string(j) + " is not on S^J");
    std::unique_lock lock(impl_->mutex);
    return impl_->cache.emplace(j, std::move(model)).first->second;
}

const PenaltyModel& MarginalFamily::penalty_entry(const FiniteSubset& j) const {
    const auto model = entry(j);
    std::shared_lock lock(impl_->mutex);
    const auto* pm = impl_->cache.at(j).penalty();
    if (!pm)
        throw PreconditionError("MarginalFamily: entry " + to_string(j) + " is not penalty-dual");
    return *pm;
}

MarginalFamily MarginalFamily::with_override(const FiniteSubset& j, ExpectationModel model) const {
    if (!has_entry(j))
        throw ArgumentError("MarginalFamily: no entry for " + to_string(j));
    if (!(model.space() == product_space(impl_->base, j)))
        throw DimensionError("MarginalFamily: override is not on S^J");
    auto inner = impl_->generator;
    auto fixed = impl_->fixed;
    if (fixed)
        fixed->insert_or_assign(j, model);
    MarginalFamily out(
        impl_->base,
        [inner, j, model](const FiniteSubset& k) { return k == j ? model : inner(k); },
        impl_->max_index, impl_->description + " (override at " + to_string(j) + ")");
    out.impl_->fixed = std::move(fixed);
    return out;
}

void MarginalFamily::mark_verified(const FiniteSubset& j) const {
    std::unique_lock lock(impl_->mutex);
    impl_->verified[j] = true;
}

bool MarginalFamily::is_verified(const FiniteSubset& j) const {
    std::shared_lock lock(impl_->mutex);
    return impl_->verified.count(j) > 0;
}

MarginalFamily dirac_family(const StateSpace& base, std::vector<std::size_t> y) {
    for (std::size_t v : y)
        if (v >= base.size())
            throw DomainError("dirac_family: path value outside the state space");
    return MarginalFamily(
        base,
        [base, y](const FiniteSubset& j) {
            std::vector<std::size_t> tuple;
            for (Index c : j) {
                const auto i = static_cast<std::size_t>(c);
                tuple.push_back(i < y.size() ? y[i] : 0);
            }
            const auto sp = product_space(base, j);
            return ExpectationModel(PenaltyModel::linear(Scenario::dirac(sp, index_of_tuple(tuple, base.size()))));
        },
        std::nullopt, "dirac");
}

MarginalFamily full_simplex_family(const StateSpace& base) {
    return MarginalFamily(
        base,
        [base](const FiniteSubset& j) {
            const auto sp = product_space(base, j);
            std::vector<Scenario> all;
            all.reserve(sp.size());
            for (std::size_t i = 0; i < sp.size(); ++i)
                all.push_back(Scenario::dirac(sp, i));
            return ExpectationModel(PenaltyModel::sublinear(std::move(all)));
        },
        std::nullopt, "full simplex");
}

MarginalFamily iid_family(const Scenario& p) {
    const auto base = p.space();
    std::vector<double> w(p.weights().begin(), p.weights().end());
    return MarginalFamily(
        base,
        [base, w](const FiniteSubset& j) {
            const auto sp = product_space(base, j);
            std::vector<double> mass(sp.size(), 1.0);
            for (std::size_t i = 0; i < sp.size(); ++i)
                for (std::size_t v : tuple_of(i, base.size(), j.size()))
                    mass[i] *= w[v];
            double total = 0.0;
            for (double m : mass)
                total += m;
            for (double& m : mass)
                m /= total;
            return ExpectationModel(PenaltyModel::linear(Scenario(sp, std::move(mass))));
        },
        std::nullopt, "iid");
}

} // namespace robustexp
