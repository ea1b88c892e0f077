#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace robustexp::lp {

enum class Sense { less_equal, equal, greater_equal };
enum class Status { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(Status s) noexcept;

struct Result {
    Status status = Status::iteration_limit;
    double objective = 0.0;
    std::vector<double> x;
    std::size_t iterations = 0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/**
 * A small dense linear program
 *
 *     minimize (or maximize)  c'x
 *     subject to              a_i'x (<=, =, >=) b_i
 *                             lo <= x <= hi
 *
 * solved by a two-phase tableau simplex. Variables default to x >= 0.
 * Sized for desk-scale problems (hundreds of rows and columns).
 */
class LinearProgram {
  public:
    explicit LinearProgram(std::size_t num_vars);

    std::size_t num_vars() const noexcept { return lo_.size(); }
    std::size_t num_constraints() const noexcept { return rows_.size(); }

    void set_bounds(std::size_t var, double lo, double hi);
    void set_free(std::size_t var) { set_bounds(var, -kInf, kInf); }

    void set_objective(std::vector<double> c, bool maximize = false);
    void add_constraint(std::vector<double> row, Sense sense, double rhs);

    /// `tol` is the feasibility tolerance on the phase-one objective.
    Result solve(double tol = 1e-9) const;

  private:
    std::vector<double> lo_, hi_;
    std::vector<double> c_;
    bool maximize_ = false;
    std::vector<std::vector<double>> rows_;
    std::vector<Sense> senses_;
    std::vector<double> rhs_;
};

} // namespace robustexp::lp
