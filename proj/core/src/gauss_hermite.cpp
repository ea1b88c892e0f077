#include "robustexp/gauss_hermite.hpp"

#include "robustexp/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace robustexp {

namespace {

QuadratureRule build(std::size_t n) {
    QuadratureRule r;
    if (n == 1) {
        r.nodes = {0.0};
        r.weights = {1.0};
        return r;
    }
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k < n; ++k) {
        const double b = std::sqrt(static_cast<double>(k));
        const auto i = static_cast<Eigen::Index>(k);
        jac(i, i - 1) = b;
        jac(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    if (es.info() != Eigen::Success)
        throw NumericError("gauss_hermite: eigenvalue solver failed");
    std::vector<double> z(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<Eigen::Index>(i);
        z[i] = es.eigenvalues()(c);
        const double v = es.eigenvectors()(0, c);
        w[i] = v * v;
    }
    r.nodes.resize(n);
    r.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t m = n - 1 - i;
        r.nodes[i] = 0.5 * (z[i] - z[m]);
        r.weights[i] = 0.5 * (w[i] + w[m]);
    }
    if (n % 2 == 1)
        r.nodes[n / 2] = 0.0;
    double total = 0.0;
    for (double x : r.weights)
        total += x;
    for (double& x : r.weights)
        x /= total;
    return r;
}

} // namespace

const QuadratureRule& gauss_hermite(std::size_t order) {
    if (order == 0 || order > 200)
        throw ArgumentError("gauss_hermite: order must be in [1, 200]");
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[order];
    if (!slot)
        slot = std::make_unique<QuadratureRule>(build(order));
    return *slot;
}

} // namespace robustexp
