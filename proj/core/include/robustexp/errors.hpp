#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace robustexp {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Vector lengths or state spaces do not match.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Input outside the mathematical domain (non-finite values, bad maps).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Invalid argument to an operation (empty lists, non-positive radius, ...).
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// A documented precondition of an operation is violated.
class PreconditionError : public Error {
  public:
    using Error::Error;
};

/// The LP solver or an iterative method failed.
class NumericError : public Error {
  public:
    using Error::Error;
};

/// A marginal family fails a consistency check. Carries the offending pair.
class ConsistencyError : public Error {
  public:
    ConsistencyError(const std::string& what, std::string witness)
        : Error(what), witness_(std::move(witness)) {}
    const std::string& witness() const noexcept { return witness_; }

  private:
    std::string witness_;
};

/// A model-definition document is malformed. `field` is a JSON pointer
/// ("/family/horizon"); `line` is 0 when unknown.
class DocumentError : public Error {
  public:
    DocumentError(std::string field, std::size_t line, const std::string& message)
        : Error(format(field, line, message)), field_(std::move(field)), line_(line) {}
    const std::string& field() const noexcept { return field_; }
    std::size_t line() const noexcept { return line_; }

  private:
    static std::string format(const std::string& field, std::size_t line, const std::string& message) {
        std::string out;
        if (line > 0)
            out += "line " + std::to_string(line) + ": ";
        if (!field.empty())
            out += "field '" + field + "': ";
        return out + message;
    }
    std::string field_;
    std::size_t line_;
};

} // namespace robustexp
