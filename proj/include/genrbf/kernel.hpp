#ifndef GENRBF_KERNEL_HPP_
#define GENRBF_KERNEL_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "genrbf/representation.hpp"

namespace genrbf {

/// Kernel width gamma = 1 / (4 sigma^2).
struct KernelParams {
    double gamma;
};

struct GramMatrix {
    Eigen::MatrixXd entries;  // symmetric, unit diagonal

    int size() const { return static_cast<int>(entries.rows()); }
};

/// Kernel value between two represented points:
///   K = Z(V,W) * exp(-1/2 (mV-mW)^T SigmaHat^{-1} (mV-mW)),
/// SigmaHat = (1/2gamma) I + SigmaV + SigmaW. For two Dirac
/// representations this is the classical RBF exp(-gamma ||x-y||^2).
double kernel_value(const PointRepresentation& a, const PointRepresentation& b,
                    const KernelParams& params);

/// L2 inner product of two nondegenerate Gaussians:
/// <N(m1,S1), N(m2,S2)> = N(m1-m2, S1+S2)(0).
double gaussian_l2_inner(const Eigen::VectorXd& m1, const Eigen::MatrixXd& s1,
                         const Eigen::VectorXd& m2, const Eigen::MatrixXd& s2);

/// Convolution with N(0, sigma^2 I): returns (mean, ambient_cov + sigma^2 I)
/// with sigma^2 = 1/(4 gamma). The result is nondegenerate even for Diracs.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> embed_regularize(const PointRepresentation& rep,
                                                             const KernelParams& params);

/// Full Gram matrix; only the upper triangle is computed and mirrored,
/// the diagonal is pinned to exactly 1.
GramMatrix gram(const std::vector<PointRepresentation>& reps, const KernelParams& params);

/// Rectangular kernel block, entry (i,j) = K(rows[i], cols[j]).
Eigen::MatrixXd gram_cross(const std::vector<PointRepresentation>& rows,
                           const std::vector<PointRepresentation>& cols,
                           const KernelParams& params);

/// CSV export: row-major, no header.
void save_gram_csv(const GramMatrix& g, const std::string& path);
/// Binary export: magic "GRBF", u32 M, little-endian f64 upper triangle
/// including the diagonal.
void save_gram_binary(const GramMatrix& g, const std::string& path);
GramMatrix load_gram_binary(const std::string& path);

}  // namespace genrbf

#endif  // GENRBF_KERNEL_HPP_
