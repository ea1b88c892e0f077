#pragma once

#include "robustexp/expectation.hpp"
#include "robustexp/product_space.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace robustexp {

/**
 * A family (E_J) of expectations on S^J indexed by finite subsets J of a
 * countable index set {0, 1, ...}, optionally bounded by a largest index.
 *
 * Entries are produced on demand by a deterministic generator and memoized.
 * The cache is safe for concurrent readers; a missing entry is generated
 * outside the lock and the first insertion wins.
 */
class MarginalFamily {
  public:
    using Generator = std::function<ExpectationModel(const FiniteSubset&)>;

    MarginalFamily(StateSpace base, Generator generator, std::optional<Index> max_index = std::nullopt,
                   std::string description = {});

    /// Family with a fixed, finite set of entries.
    static MarginalFamily explicit_entries(StateSpace base, std::map<FiniteSubset, ExpectationModel> entries,
                                           std::string description = {});

    const StateSpace& base() const noexcept;
    std::optional<Index> max_index() const noexcept;
    const std::string& description() const noexcept;

    bool has_entry(const FiniteSubset& j) const;
    /// Throws ArgumentError if J is outside the family's domain.
    ExpectationModel entry(const FiniteSubset& j) const;
    /// Entry as a penalty model; throws PreconditionError for other kinds.
    const PenaltyModel& penalty_entry(const FiniteSubset& j) const;

    /// Copy with E_J replaced. The copy has its own cache.
    MarginalFamily with_override(const FiniteSubset& j, ExpectationModel model) const;

    /// Records that the consistency of J with its immediate subsets has been checked.
    void mark_verified(const FiniteSubset& j) const;
    bool is_verified(const FiniteSubset& j) const;

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

/// E_J = delta at (y_j)_{j in J}; coordinates beyond y.size() are y = 0.
MarginalFamily dirac_family(const StateSpace& base, std::vector<std::size_t> y);

/// Q_J = all probability measures on S^J, i.e. E_J = max.
MarginalFamily full_simplex_family(const StateSpace& base);

/// Linear family of the product measure p^{(x)J}.
MarginalFamily iid_family(const Scenario& p);

} // namespace robustexp
