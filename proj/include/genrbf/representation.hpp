#ifndef GENRBF_REPRESENTATION_HPP_
#define GENRBF_REPRESENTATION_HPP_

#include <Eigen/Dense>
#include <vector>

#include "genrbf/density.hpp"
#include "genrbf/subspace.hpp"

namespace genrbf {

/// Degenerate Gaussian N(mean, basis * small_cov * basis^T) supported on
/// an affine subspace. Kept in factored form; the ambient covariance is
/// materialized only on demand. subspace_dim() == 0 is a Dirac measure.
struct PointRepresentation {
    Eigen::VectorXd mean;       // length N
    Eigen::MatrixXd basis;      // N x n, orthonormal
    Eigen::MatrixXd small_cov;  // n x n SPD (empty for a Dirac)
    Eigen::MatrixXd cov_sqrt;   // n x n symmetric square root of small_cov

    int dim() const { return static_cast<int>(mean.size()); }
    int subspace_dim() const { return static_cast<int>(basis.cols()); }
    bool dirac() const { return basis.cols() == 0; }

    static PointRepresentation dirac_at(const Eigen::VectorXd& x);
};

/// Conditions the data Gaussian on the affine subspace of `point` and
/// lifts the result back to the ambient space.
PointRepresentation condition(const GaussianModel& model, const MissingSubspacePoint& point);

std::vector<PointRepresentation> condition_all(const GaussianModel& model,
                                               const std::vector<MissingSubspacePoint>& points);

/// Materializes basis * small_cov * basis^T (zero matrix for a Dirac).
Eigen::MatrixXd ambient_cov(const PointRepresentation& rep);

}  // namespace genrbf

#endif  // GENRBF_REPRESENTATION_HPP_
