#include "robustexp/product_space.hpp"

#include "robustexp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace robustexp {

FiniteSubset make_subset(std::vector<Index> indices) {
    if (indices.empty())
        throw ArgumentError("index subset must be nonempty");
    std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
        throw ArgumentError("index subset has duplicates");
    return indices;
}

bool is_subset(const FiniteSubset& k, const FiniteSubset& j) {
    return std::includes(j.begin(), j.end(), k.begin(), k.end());
}

FiniteSubset subset_union(const FiniteSubset& a, const FiniteSubset& b) {
    FiniteSubset out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::string to_string(const FiniteSubset& j) {
    std::string s = "{";
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(j[i]);
    }
    return s + "}";
}

FiniteSubset parse_subset(const std::string& text) {
    std::string t;
    for (char c : text)
        if (c != '{' && c != '}' && c != ' ')
            t += c;
    std::vector<Index> out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            throw ArgumentError("cannot parse index subset '" + text + "'");
        }
        if (used != item.size())
            throw ArgumentError("cannot parse index subset '" + text + "'");
        out.push_back(v);
    }
    return make_subset(std::move(out));
}

StateSpace product_space(const StateSpace& base, const FiniteSubset& j) {
    const double total = std::pow(static_cast<double>(base.size()), static_cast<double>(j.size()));
    if (total > static_cast<double>(kProductCap))
        throw ArgumentError("product space " + to_string(j) + " exceeds the desk-scale cap of 10^6 states");
    return StateSpace::product(base, j);
}

std::vector<std::size_t> tuple_of(std::size_t index, std::size_t base_size, std::size_t length) {
    std::vector<std::size_t> t(length);
    for (std::size_t d = length; d-- > 0;) {
        t[d] = index % base_size;
        index /= base_size;
    }
    return t;
}

std::size_t index_of_tuple(const std::vector<std::size_t>& tuple, std::size_t base_size) {
    std::size_t i = 0;
    for (std::size_t v : tuple)
        i = i * base_size + v;
    return i;
}

StateMap projection_map(std::size_t base_size, const FiniteSubset& j, const FiniteSubset& k) {
    if (!is_subset(k, j))
        throw ArgumentError("projection: " + to_string(k) + " is not a subset of " + to_string(j));
    std::vector<std::size_t> pos;
    for (Index c : k)
        pos.push_back(static_cast<std::size_t>(std::lower_bound(j.begin(), j.end(), c) - j.begin()));
    std::size_t total = 1;
    for (std::size_t i = 0; i < j.size(); ++i)
        total *= base_size;
    StateMap map(total);
    std::vector<std::size_t> tuple(j.size(), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t target = 0;
        for (std::size_t p : pos)
            target = target * base_size + tuple[p];
        map[idx] = target;
        for (std::size_t d = j.size(); d-- > 0;) {
            if (++tuple[d] < base_size)
                break;
            tuple[d] = 0;
        }
    }
    return map;
}

RandomVariable project_function(const RandomVariable& f, const FiniteSubset& j) {
    const auto& sp = f.space();
    if (!sp.is_product())
        throw ArgumentError("project_function: function is not on a product space");
    const auto& k = sp.coordinates();
    const auto base = sp.base();
    if (k == j)
        return f;
    const auto target = product_space(base, j);
    return pull_back(f, projection_map(base.size(), j, k), target);
}

CylinderFunction::CylinderFunction(FiniteSubset j_, RandomVariable f_) : j(std::move(j_)), f(std::move(f_)) {
    if (!f.space().is_product() || f.space().coordinates() != j)
        throw PreconditionError("cylinder function: values are not indexed by S^" + to_string(j));
}

CylinderFunction reexpress(const CylinderFunction& g, const FiniteSubset& j_prime) {
    return {j_prime, project_function(g.f, j_prime)};
}

} // namespace robustexp
