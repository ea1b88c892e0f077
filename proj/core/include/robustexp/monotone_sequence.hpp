#pragma once

#include "robustexp/errors.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace robustexp {

enum class Direction { increasing, decreasing };

inline const char* to_string(Direction d) noexcept { return d == Direction::increasing ? "increasing" : "decreasing"; }

/**
 * A pointwise monotone sequence X_0, X_1, ... given by a generator or by a
 * finite list. A finite list continues with its last term, so it behaves
 * like an eventually constant sequence.
 */
template <class T>
class MonotoneSequence {
  public:
    using Generator = std::function<T(std::size_t)>;

    MonotoneSequence(Direction direction, Generator generator, std::optional<T> limit = std::nullopt)
        : direction_(direction), generator_(std::move(generator)), limit_(std::move(limit)) {
        if (!generator_)
            throw ArgumentError("MonotoneSequence: empty generator");
    }

    static MonotoneSequence from_list(Direction direction, std::vector<T> terms, std::optional<T> limit = std::nullopt) {
        if (terms.empty())
            throw ArgumentError("MonotoneSequence: empty term list");
        const std::size_t count = terms.size();
        auto gen = [terms = std::move(terms)](std::size_t k) { return terms[std::min(k, terms.size() - 1)]; };
        MonotoneSequence s(direction, std::move(gen), std::move(limit));
        s.length_ = count;
        return s;
    }

    Direction direction() const noexcept { return direction_; }
    T term(std::size_t k) const { return generator_(k); }
    const std::optional<T>& limit() const noexcept { return limit_; }
    /// Number of listed terms for list-backed sequences.
    std::optional<std::size_t> length() const noexcept { return length_; }

  private:
    Direction direction_;
    Generator generator_;
    std::optional<T> limit_;
    std::optional<std::size_t> length_;
};

} // namespace robustexp
