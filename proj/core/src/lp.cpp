#include "robustexp/lp.hpp"

#include "robustexp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace robustexp::lp {

const char* to_string(Status s) noexcept {
    switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

LinearProgram::LinearProgram(std::size_t num_vars)
    : lo_(num_vars, 0.0), hi_(num_vars, kInf), c_(num_vars, 0.0) {}

void LinearProgram::set_bounds(std::size_t var, double lo, double hi) {
    if (var >= num_vars())
        throw ArgumentError("LinearProgram::set_bounds: variable out of range");
    if (lo > hi)
        throw ArgumentError("LinearProgram::set_bounds: empty interval");
    lo_[var] = lo;
    hi_[var] = hi;
}

void LinearProgram::set_objective(std::vector<double> c, bool maximize) {
    if (c.size() != num_vars())
        throw DimensionError("LinearProgram::set_objective: length mismatch");
    c_ = std::move(c);
    maximize_ = maximize;
}

void LinearProgram::add_constraint(std::vector<double> row, Sense sense, double rhs) {
    if (row.size() != num_vars())
        throw DimensionError("LinearProgram::add_constraint: length mismatch");
    rows_.push_back(std::move(row));
    senses_.push_back(sense);
    rhs_.push_back(rhs);
}

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kRatioSlack = 1e-12;
constexpr double kCostEps = 1e-11;

// Dense tableau over standard-form columns y >= 0. Row m is the objective
// (reduced costs); the last column holds the right-hand side.
class Tableau {
  public:
    Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), t_((m + 1) * (n + 1), 0.0), basis_(m, 0) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * (n_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, n_); }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t r, std::size_t c) {
        const double p = at(r, c);
        double* pr = &t_[r * (n_ + 1)];
        for (std::size_t j = 0; j <= n_; ++j)
            pr[j] /= p;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r)
                continue;
            double* pi = &t_[i * (n_ + 1)];
            const double f = pi[c];
            if (f == 0.0)
                continue;
            for (std::size_t j = 0; j <= n_; ++j)
                pi[j] -= f * pr[j];
            pi[c] = 0.0;
        }
        basis_[r] = c;
    }

    void remove_row(std::size_t r) {
        auto first = t_.begin() + static_cast<std::ptrdiff_t>(r * (n_ + 1));
        t_.erase(first, first + static_cast<std::ptrdiff_t>(n_ + 1));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --m_;
    }

    // Minimizes the objective row over columns where allowed[j] is true.
    Status optimize(const std::vector<char>& allowed, std::size_t max_iter, std::size_t& iters) {
        std::size_t degenerate = 0;
        bool bland = false;
        while (iters < max_iter) {
            std::size_t enter = n_;
            double best = -kCostEps;
            for (std::size_t j = 0; j < n_; ++j) {
                if (!allowed[j])
                    continue;
                const double d = at(m_, j);
                if (bland) {
                    if (d < -kCostEps) {
                        enter = j;
                        break;
                    }
                } else if (d < best) {
                    best = d;
                    enter = j;
                }
            }
            if (enter == n_)
                return Status::optimal;
            // Two-pass ratio test: among rows within kRatioSlack of the
            // minimum ratio prefer the largest pivot (smallest basis index
            // under Bland's rule).
            double ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                if (a > kPivotEps)
                    ratio = std::min(ratio, std::max(rhs(i), 0.0) / a);
            }
            if (!std::isfinite(ratio))
                return Status::unbounded;
            std::size_t leave = m_;
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                if (a <= kPivotEps || std::max(rhs(i), 0.0) / a > ratio + kRatioSlack)
                    continue;
                if (leave == m_ || (bland ? basis_[i] < basis_[leave] : a > at(leave, enter)))
                    leave = i;
            }
            degenerate = ratio <= 1e-13 ? degenerate + 1 : 0;
            if (degenerate > 50)
                bland = true;
            if (rhs(leave) < 0.0)
                rhs(leave) = 0.0;
            pivot(leave, enter);
            ++iters;
        }
        return Status::iteration_limit;
    }

  private:
    std::size_t m_, n_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

} // namespace

Result LinearProgram::solve(double tol) const {
    const std::size_t nv = num_vars();

    // Map each original variable onto nonnegative standard columns:
    // x = lo + y (finite lo), x = hi - y (only hi finite), x = y+ - y- (free).
    struct Map {
        std::size_t col;
        int kind; // 0: lo + y, 1: hi - y, 2: y+ - y-
    };
    std::vector<Map> map(nv);
    std::size_t ncols = 0;
    for (std::size_t j = 0; j < nv; ++j) {
        if (std::isfinite(lo_[j]))
            map[j] = {ncols++, 0};
        else if (std::isfinite(hi_[j]))
            map[j] = {ncols++, 1};
        else {
            map[j] = {ncols, 2};
            ncols += 2;
        }
    }

    // Rows in standard columns, including finite two-sided bounds as rows.
    std::vector<std::vector<double>> rows;
    std::vector<Sense> senses;
    std::vector<double> rhs;
    auto push_row = [&](const std::vector<double>& a, Sense s, double b) {
        std::vector<double> r(ncols, 0.0);
        for (std::size_t j = 0; j < nv; ++j) {
            const double v = a[j];
            if (v == 0.0)
                continue;
            const Map& mp = map[j];
            if (mp.kind == 0) {
                r[mp.col] += v;
                b -= v * lo_[j];
            } else if (mp.kind == 1) {
                r[mp.col] -= v;
                b -= v * hi_[j];
            } else {
                r[mp.col] += v;
                r[mp.col + 1] -= v;
            }
        }
        rows.push_back(std::move(r));
        senses.push_back(s);
        rhs.push_back(b);
    };
    for (std::size_t i = 0; i < rows_.size(); ++i)
        push_row(rows_[i], senses_[i], rhs_[i]);
    for (std::size_t j = 0; j < nv; ++j) {
        if (std::isfinite(lo_[j]) && std::isfinite(hi_[j])) {
            std::vector<double> r(ncols, 0.0);
            r[map[j].col] = 1.0;
            rows.push_back(std::move(r));
            senses.push_back(Sense::less_equal);
            rhs.push_back(hi_[j] - lo_[j]);
        } else if (map[j].kind == 2 && std::isfinite(hi_[j])) {
            std::vector<double> a(nv, 0.0);
            a[j] = 1.0;
            push_row(a, Sense::less_equal, hi_[j]);
        }
    }

    const std::size_t m = rows.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (rhs[i] < 0.0) {
            for (double& v : rows[i])
                v = -v;
            rhs[i] = -rhs[i];
            if (senses[i] == Sense::less_equal)
                senses[i] = Sense::greater_equal;
            else if (senses[i] == Sense::greater_equal)
                senses[i] = Sense::less_equal;
        }
    }

    std::size_t nslack = 0, nart = 0;
    for (Sense s : senses) {
        if (s != Sense::equal)
            ++nslack;
        if (s != Sense::less_equal)
            ++nart;
    }
    const std::size_t ntot = ncols + nslack + nart;
    Tableau tab(m, ntot);
    std::vector<char> is_art(ntot, 0);
    std::size_t sc = ncols, ac = ncols + nslack;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < ncols; ++j)
            tab.at(i, j) = rows[i][j];
        tab.rhs(i) = rhs[i];
        if (senses[i] == Sense::less_equal) {
            tab.at(i, sc) = 1.0;
            tab.basis()[i] = sc++;
        } else {
            if (senses[i] == Sense::greater_equal)
                tab.at(i, sc++) = -1.0;
            tab.at(i, ac) = 1.0;
            is_art[ac] = 1;
            tab.basis()[i] = ac++;
        }
    }

    Result res;
    const std::size_t max_iter = 200 * (m + ntot) + 1000;

    if (nart > 0) {
        // Phase one: minimize the sum of artificials.
        for (std::size_t i = 0; i < m; ++i) {
            if (!is_art[tab.basis()[i]])
                continue;
            for (std::size_t j = 0; j <= ntot; ++j)
                tab.at(m, j) -= tab.at(i, j);
        }
        for (std::size_t j = 0; j < ntot; ++j)
            if (is_art[j])
                tab.at(m, j) = 0.0;
        std::vector<char> allowed(ntot, 1);
        Status st = tab.optimize(allowed, max_iter, res.iterations);
        if (st == Status::iteration_limit) {
            res.status = st;
            return res;
        }
        double infeas = -tab.rhs(tab.rows());
        double scale = 1.0;
        for (double b : rhs)
            scale = std::max(scale, std::abs(b));
        if (infeas > tol * scale) {
            res.status = Status::infeasible;
            return res;
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        for (std::size_t i = 0; i < tab.rows();) {
            if (!is_art[tab.basis()[i]]) {
                ++i;
                continue;
            }
            std::size_t enter = ntot;
            double best = kPivotEps;
            for (std::size_t j = 0; j < ntot; ++j) {
                if (is_art[j])
                    continue;
                if (std::abs(tab.at(i, j)) > best) {
                    best = std::abs(tab.at(i, j));
                    enter = j;
                }
            }
            if (enter == ntot) {
                tab.remove_row(i);
            } else {
                tab.pivot(i, enter);
                ++i;
            }
        }
    }

    // Phase two objective in standard columns (always minimize).
    const std::size_t mm = tab.rows();
    std::vector<double> cstd(ntot, 0.0);
    const double sgn = maximize_ ? -1.0 : 1.0;
    for (std::size_t j = 0; j < nv; ++j) {
        const double cj = sgn * c_[j];
        const Map& mp = map[j];
        if (mp.kind == 0) {
            cstd[mp.col] += cj;
        } else if (mp.kind == 1) {
            cstd[mp.col] -= cj;
        } else {
            cstd[mp.col] += cj;
            cstd[mp.col + 1] -= cj;
        }
    }
    for (std::size_t j = 0; j <= ntot; ++j)
        tab.at(mm, j) = j < ntot ? cstd[j] : 0.0;
    for (std::size_t i = 0; i < mm; ++i) {
        const double cb = cstd[tab.basis()[i]];
        if (cb == 0.0)
            continue;
        for (std::size_t j = 0; j <= ntot; ++j)
            tab.at(mm, j) -= cb * tab.at(i, j);
    }
    std::vector<char> allowed(ntot, 1);
    for (std::size_t j = 0; j < ntot; ++j)
        if (is_art[j])
            allowed[j] = 0;
    Status st = tab.optimize(allowed, max_iter, res.iterations);
    res.status = st;
    if (st != Status::optimal)
        return res;

    std::vector<double> y(ntot, 0.0);
    for (std::size_t i = 0; i < mm; ++i)
        y[tab.basis()[i]] = std::max(tab.rhs(i), 0.0);
    res.x.assign(nv, 0.0);
    double obj = 0.0;
    for (std::size_t j = 0; j < nv; ++j) {
        const Map& mp = map[j];
        if (mp.kind == 0)
            res.x[j] = lo_[j] + y[mp.col];
        else if (mp.kind == 1)
            res.x[j] = hi_[j] - y[mp.col];
        else
            res.x[j] = y[mp.col] - y[mp.col + 1];
        obj += c_[j] * res.x[j];
    }
    res.objective = obj;
    return res;
}

} // namespace robustexp::lp
