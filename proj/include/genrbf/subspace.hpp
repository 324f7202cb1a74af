#ifndef GENRBF_SUBSPACE_HPP_
#define GENRBF_SUBSPACE_HPP_

#include <Eigen/Dense>

#include "genrbf/dataset.hpp"

namespace genrbf {

/// An incomplete point viewed as the affine subspace base + span(basis).
/// The base vector carries 0 on coordinates spanned by the basis; any
/// other representative of the subspace would be equivalent.
struct MissingSubspacePoint {
    Eigen::VectorXd base;    // length N
    Eigen::MatrixXd basis;   // N x n, orthonormal columns

    int dim() const { return static_cast<int>(base.size()); }
    int subspace_dim() const { return static_cast<int>(basis.cols()); }
    bool complete() const { return basis.cols() == 0; }
};

/// Canonical construction: basis columns are the unit vectors of the
/// missing coordinates, base agrees with the observed ones.
MissingSubspacePoint from_incomplete(const IncompletePoint& point);

std::vector<MissingSubspacePoint> from_dataset(const Dataset& data);

/// Maps the subspace through w -> Aw + b. Throws NumericError when the
/// mapped basis loses rank.
MissingSubspacePoint transform_affine(const MissingSubspacePoint& point,
                                      const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Affine transform with A = Sigma^{-1/2}, b = -Sigma^{-1/2} m.
MissingSubspacePoint whiten(const MissingSubspacePoint& point, const Eigen::MatrixXd& sigma,
                            const Eigen::VectorXd& m);

/// Symmetric inverse square root via eigendecomposition; eigenvalues
/// floored at 1e-12 * lambda_max. Throws on non-SPD input.
Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& sigma);

}  // namespace genrbf

#endif  // GENRBF_SUBSPACE_HPP_
