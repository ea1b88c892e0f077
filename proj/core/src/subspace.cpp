#include "robustexp/subspace.hpp"

#include "robustexp/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace robustexp {

struct SubspaceModel::Impl {
    std::vector<RandomVariable> basis;
    ExpectationModel expectation;
    Eigen::MatrixXd b;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
};

namespace {

Eigen::Map<const Eigen::VectorXd> as_eigen(std::span<const double> v) {
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

} // namespace

SubspaceModel::SubspaceModel(std::vector<RandomVariable> basis, ExpectationModel expectation) {
    if (basis.empty())
        throw ArgumentError("SubspaceModel: empty basis");
    const auto& sp = expectation.space();
    for (const auto& v : basis)
        require_same_space(sp, v.space(), "SubspaceModel");
    const auto n = static_cast<Eigen::Index>(sp.size());
    const auto d = static_cast<Eigen::Index>(basis.size());
    if (d > n)
        throw ArgumentError("SubspaceModel: more basis vectors than states");

    auto impl = std::make_shared<Impl>(Impl{std::move(basis), std::move(expectation), Eigen::MatrixXd(n, d), {}});
    for (Eigen::Index j = 0; j < d; ++j)
        impl->b.col(j) = as_eigen(impl->basis[static_cast<std::size_t>(j)].values());
    impl->qr.compute(impl->b);
    impl->qr.setThreshold(1e-10);
    if (impl->qr.rank() != d)
        throw ArgumentError("SubspaceModel: basis is linearly dependent");
    impl_ = std::move(impl);

    const std::vector<double> one(sp.size(), 1.0);
    if (!contains(one))
        throw ArgumentError("SubspaceModel: the constant 1 is not in the span");
}

SubspaceModel SubspaceModel::constants(ExpectationModel expectation) {
    const auto& sp = expectation.space();
    return {{RandomVariable::constant(sp, 1.0)}, std::move(expectation)};
}

const StateSpace& SubspaceModel::space() const noexcept { return impl_->expectation.space(); }
const std::vector<RandomVariable>& SubspaceModel::basis() const noexcept { return impl_->basis; }
const ExpectationModel& SubspaceModel::expectation() const noexcept { return impl_->expectation; }
std::size_t SubspaceModel::dimension() const noexcept { return impl_->basis.size(); }

std::vector<double> SubspaceModel::coefficients(std::span<const double> x) const {
    if (x.size() != space().size())
        throw DimensionError("SubspaceModel::coefficients: length mismatch");
    const Eigen::VectorXd c = impl_->qr.solve(as_eigen(x).eval());
    return {c.data(), c.data() + c.size()};
}

std::vector<double> SubspaceModel::combine(std::span<const double> c) const {
    if (c.size() != dimension())
        throw DimensionError("SubspaceModel::combine: coefficient length mismatch");
    const Eigen::VectorXd v = impl_->b * as_eigen(c);
    return {v.data(), v.data() + v.size()};
}

double SubspaceModel::projection_residual(std::span<const double> x) const {
    const auto c = coefficients(x);
    const auto p = combine(c);
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        r = std::max(r, std::abs(p[i] - x[i]));
    return r;
}

bool SubspaceModel::contains(std::span<const double> x, double tol) const { return projection_residual(x) <= tol; }

double SubspaceModel::evaluate(const RandomVariable& x, double tol) const {
    require_same_space(space(), x.space(), "SubspaceModel::evaluate");
    if (!contains(x.values(), tol))
        throw PreconditionError("SubspaceModel::evaluate: argument is outside the subspace");
    return impl_->expectation.evaluate(x);
}

} // namespace robustexp
