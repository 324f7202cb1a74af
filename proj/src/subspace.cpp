#include "genrbf/subspace.hpp"

#include "genrbf/error.hpp"

namespace genrbf {

MissingSubspacePoint from_incomplete(const IncompletePoint& point) {
    const int n = point.dim();
    MissingSubspacePoint out;
    out.base = point.values;
    out.basis = Eigen::MatrixXd::Zero(n, static_cast<int>(point.missing.size()));
    int col = 0;
    for (int j : point.missing) {
        out.base[j] = 0.0;
        out.basis(j, col++) = 1.0;
    }
    return out;
}

std::vector<MissingSubspacePoint> from_dataset(const Dataset& data) {
    std::vector<MissingSubspacePoint> out;
    out.reserve(data.points.size());
    for (const auto& p : data.points) out.push_back(from_incomplete(p));
    return out;
}

MissingSubspacePoint transform_affine(const MissingSubspacePoint& point,
                                      const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    if (A.rows() != point.dim() || A.cols() != point.dim() || b.size() != point.dim())
        throw Error("affine map dimension mismatch");
    MissingSubspacePoint out;
    out.base = A * point.base + b;
    const int n = point.subspace_dim();
    if (n == 0) {
        out.basis = Eigen::MatrixXd::Zero(point.dim(), 0);
        return out;
    }
    Eigen::MatrixXd mapped = A * point.basis;
    // Column-pivoted QR keeps the orthonormalization stable.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(mapped);
    Eigen::MatrixXd r = qr.matrixR().topLeftCorner(n, n).triangularView<Eigen::Upper>();
    double largest = r.diagonal().cwiseAbs().maxCoeff();
    double smallest = r.diagonal().cwiseAbs().minCoeff();
    if (largest <= 0.0 || smallest < 1e-10 * largest)
        throw NumericError("mapped basis is rank deficient: affine map must be invertible");
    out.basis = qr.householderQ() * Eigen::MatrixXd::Identity(point.dim(), n);
    return out;
}

Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols()) throw Error("covariance must be square");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + sigma.cwiseAbs().maxCoeff()))
        throw NumericError("covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
    if (eig.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
    Eigen::VectorXd evals = eig.eigenvalues();
    double lmax = evals.maxCoeff();
    if (lmax <= 0.0) throw NumericError("covariance is not positive definite");
    const double floor = 1e-12 * lmax;
    if (evals.minCoeff() <= 0.0) throw NumericError("covariance is not positive definite");
    Eigen::VectorXd inv_sqrt = evals.cwiseMax(floor).cwiseSqrt().cwiseInverse();
    return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

MissingSubspacePoint whiten(const MissingSubspacePoint& point, const Eigen::MatrixXd& sigma,
                            const Eigen::VectorXd& m) {
    Eigen::MatrixXd w = inverse_sqrt_spd(sigma);
    return transform_affine(point, w, -(w * m));
}

}  // namespace genrbf
