#include "genrbf/representation.hpp"

#include "genrbf/error.hpp"

namespace genrbf {

namespace {

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
    if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
    return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
           eig.eigenvectors().transpose();
}

}  // namespace

PointRepresentation PointRepresentation::dirac_at(const Eigen::VectorXd& x) {
    PointRepresentation rep;
    rep.mean = x;
    rep.basis.resize(x.size(), 0);
    rep.small_cov.resize(0, 0);
    rep.cov_sqrt.resize(0, 0);
    return rep;
}

PointRepresentation condition(const GaussianModel& model, const MissingSubspacePoint& point) {
    if (model.dim() != point.dim()) throw Error("model/point dimension mismatch");
    if (point.complete()) return PointRepresentation::dirac_at(point.base);

    const auto& v = point.basis;
    Eigen::LLT<Eigen::MatrixXd> llt(model.covariance);
    if (llt.info() != Eigen::Success)
        throw NumericError("model covariance is not positive definite");

    // Sigma_V = (v^T Sigma^{-1} v)^{-1}, via X = Sigma^{-1} v.
    Eigen::MatrixXd x = llt.solve(v);
    Eigen::MatrixXd vtsv = v.transpose() * x;
    Eigen::LLT<Eigen::MatrixXd> small_llt(vtsv);
    if (small_llt.info() != Eigen::Success)
        throw NumericError("v^T Sigma^{-1} v lost positive definiteness");
    const int n = point.subspace_dim();
    Eigen::MatrixXd small_cov = small_llt.solve(Eigen::MatrixXd::Identity(n, n));
    small_cov = 0.5 * (small_cov + small_cov.transpose());

    Eigen::VectorXd coeff = small_cov * (x.transpose() * (model.mean - point.base));

    PointRepresentation rep;
    rep.mean = point.base + v * coeff;
    rep.basis = v;
    rep.small_cov = small_cov;
    rep.cov_sqrt = symmetric_sqrt(small_cov);
    return rep;
}

std::vector<PointRepresentation> condition_all(const GaussianModel& model,
                                               const std::vector<MissingSubspacePoint>& points) {
    std::vector<PointRepresentation> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(condition(model, p));
    return out;
}

Eigen::MatrixXd ambient_cov(const PointRepresentation& rep) {
    if (rep.dirac()) return Eigen::MatrixXd::Zero(rep.dim(), rep.dim());
    return rep.basis * rep.small_cov * rep.basis.transpose();
}

}  // namespace genrbf
