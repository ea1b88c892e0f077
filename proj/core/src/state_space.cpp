#include "robustexp/state_space.hpp"

#include "robustexp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace robustexp {

struct StateSpace::Impl {
    std::size_t size = 0;
    std::vector<std::string> labels;  // explicit spaces
    std::shared_ptr<const Impl> base; // product spaces
    std::vector<Index> coords;
    bool generated = false;           // indexed(n): labels are the indices
};

StateSpace::StateSpace(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

StateSpace::StateSpace(std::vector<std::string> labels) {
    if (labels.empty())
        throw ArgumentError("StateSpace: at least one state is required");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels)
        if (!seen.insert(l).second)
            throw ArgumentError("StateSpace: duplicate label '" + l + "'");
    auto impl = std::make_shared<Impl>();
    impl->size = labels.size();
    impl->labels = std::move(labels);
    impl_ = std::move(impl);
}

StateSpace StateSpace::indexed(std::size_t n) {
    if (n == 0)
        throw ArgumentError("StateSpace: at least one state is required");
    auto impl = std::make_shared<Impl>();
    impl->size = n;
    impl->generated = true;
    return StateSpace(std::move(impl));
}

StateSpace StateSpace::product(const StateSpace& base, std::vector<Index> coords) {
    if (coords.empty())
        throw ArgumentError("StateSpace::product: empty coordinate set");
    if (!std::is_sorted(coords.begin(), coords.end()) ||
        std::adjacent_find(coords.begin(), coords.end()) != coords.end())
        throw ArgumentError("StateSpace::product: coordinates must be sorted and distinct");
    if (base.is_product())
        throw ArgumentError("StateSpace::product: nested products are not supported");
    double total = std::pow(static_cast<double>(base.size()), static_cast<double>(coords.size()));
    if (total > 1e9)
        throw ArgumentError("StateSpace::product: space too large");
    auto impl = std::make_shared<Impl>();
    impl->size = static_cast<std::size_t>(std::llround(total));
    impl->base = base.impl_;
    impl->coords = std::move(coords);
    return StateSpace(std::move(impl));
}

std::size_t StateSpace::size() const noexcept { return impl_->size; }

std::string StateSpace::label(std::size_t i) const {
    if (i >= impl_->size)
        throw ArgumentError("StateSpace::label: index out of range");
    if (impl_->base) {
        const StateSpace b(impl_->base);
        const std::size_t k = b.size();
        std::vector<std::size_t> digits(impl_->coords.size());
        for (std::size_t d = digits.size(); d-- > 0;) {
            digits[d] = i % k;
            i /= k;
        }
        std::string out;
        for (std::size_t d = 0; d < digits.size(); ++d) {
            if (d)
                out += ',';
            out += b.label(digits[d]);
        }
        return out;
    }
    if (impl_->generated)
        return std::to_string(i);
    return impl_->labels[i];
}

std::optional<std::size_t> StateSpace::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < size(); ++i)
        if (this->label(i) == label)
            return i;
    return std::nullopt;
}

bool StateSpace::is_product() const noexcept { return impl_->base != nullptr; }

StateSpace StateSpace::base() const { return impl_->base ? StateSpace(impl_->base) : *this; }

const std::vector<Index>& StateSpace::coordinates() const { return impl_->coords; }

bool StateSpace::operator==(const StateSpace& other) const {
    if (impl_ == other.impl_)
        return true;
    const Impl& a = *impl_;
    const Impl& b = *other.impl_;
    if (a.size != b.size || a.generated != b.generated || (a.base == nullptr) != (b.base == nullptr))
        return false;
    if (a.base)
        return a.coords == b.coords && StateSpace(a.base) == StateSpace(b.base);
    return a.generated || a.labels == b.labels;
}

void require_same_space(const StateSpace& a, const StateSpace& b, const char* context) {
    if (!(a == b))
        throw DimensionError(std::string(context) + ": state space mismatch");
}

void require_finite(std::span<const double> v, const char* context) {
    for (double x : v)
        if (!std::isfinite(x))
            throw DomainError(std::string(context) + ": non-finite value");
}

RandomVariable::RandomVariable(StateSpace space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
    if (values_.size() != space_.size())
        throw DimensionError("RandomVariable: length does not match the state space");
    require_finite(values_, "RandomVariable");
}

RandomVariable RandomVariable::constant(const StateSpace& space, double alpha) {
    return RandomVariable(space, std::vector<double>(space.size(), alpha));
}

RandomVariable RandomVariable::indicator(const StateSpace& space, std::size_t state) {
    std::vector<double> v(space.size(), 0.0);
    v.at(state) = 1.0;
    return RandomVariable(space, std::move(v));
}

double RandomVariable::sup_norm() const {
    double m = 0.0;
    for (double x : values_)
        m = std::max(m, std::abs(x));
    return m;
}

double RandomVariable::min() const { return *std::min_element(values_.begin(), values_.end()); }
double RandomVariable::max() const { return *std::max_element(values_.begin(), values_.end()); }

Scenario::Scenario(StateSpace space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
    if (weights_.size() != space_.size())
        throw DimensionError("Scenario: length does not match the state space");
    require_finite(weights_, "Scenario");
    double total = 0.0;
    for (double w : weights_) {
        if (w < 0.0)
            throw DomainError("Scenario: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > kMassTolerance)
        throw DomainError("Scenario: weights must sum to 1");
}

Scenario Scenario::dirac(const StateSpace& space, std::size_t state) {
    std::vector<double> w(space.size(), 0.0);
    w.at(state) = 1.0;
    return Scenario(space, std::move(w));
}

Scenario Scenario::uniform(const StateSpace& space) {
    return Scenario(space, std::vector<double>(space.size(), 1.0 / static_cast<double>(space.size())));
}

double Scenario::expect(std::span<const double> x) const {
    if (x.size() != weights_.size())
        throw DimensionError("Scenario::expect: length mismatch");
    return std::inner_product(weights_.begin(), weights_.end(), x.begin(), 0.0);
}

} // namespace robustexp
