#ifndef GENRBF_TEST_SUPPORT_HPP_
#define GENRBF_TEST_SUPPORT_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <vector>

#include "genrbf/dataset.hpp"
#include "genrbf/representation.hpp"
#include "genrbf/rng.hpp"

namespace testsup {

inline Eigen::VectorXd random_vector(genrbf::SplitMixRng& rng, int n, double scale = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = scale * rng.normal();
    return v;
}

/// Random SPD matrix A A^T + eps I with controlled conditioning.
inline Eigen::MatrixXd random_spd(genrbf::SplitMixRng& rng, int n, double eps = 0.1) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    return a * a.transpose() / n + eps * Eigen::MatrixXd::Identity(n, n);
}

/// Random orthonormal N x n basis from the QR of a Gaussian matrix.
inline Eigen::MatrixXd random_basis(genrbf::SplitMixRng& rng, int ambient, int n) {
    Eigen::MatrixXd a(ambient, n);
    for (int i = 0; i < ambient; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return qr.householderQ() * Eigen::MatrixXd::Identity(ambient, n);
}

/// Complete dataset drawn from N(mean, cov) with +-1 labels assigned by a
/// random hyperplane (labels are irrelevant for most numeric tests).
inline genrbf::Dataset gaussian_dataset(genrbf::SplitMixRng& rng, int rows,
                                        const Eigen::VectorXd& mean,
                                        const Eigen::MatrixXd& cov) {
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    genrbf::Dataset data;
    for (int r = 0; r < rows; ++r) {
        genrbf::IncompletePoint p;
        p.values = mean + llt.matrixL() * random_vector(rng, static_cast<int>(mean.size()));
        data.points.push_back(std::move(p));
        data.labels.push_back(r % 2 == 0 ? 1 : -1);
    }
    return data;
}

/// Applies an MCAR-style mask directly (independent per-cell coin),
/// guaranteeing every feature keeps at least one observed value and
/// both label classes survive.
inline genrbf::Dataset mask_random(genrbf::SplitMixRng& rng, genrbf::Dataset data,
                                   double p_missing) {
    const int n = data.dim();
    for (auto& pt : data.points) {
        pt.missing.clear();
        for (int j = 0; j < n; ++j)
            if (rng.uniform() < p_missing) pt.missing.push_back(j);
    }
    for (int j = 0; j < n; ++j) {
        bool observed = false;
        for (const auto& pt : data.points) observed = observed || !pt.is_missing(j);
        if (!observed) {
            auto& m = data.points[0].missing;
            m.erase(std::remove(m.begin(), m.end(), j), m.end());
        }
    }
    return data;
}

/// Two well-separated Gaussian blobs for SVM sanity checks.
inline genrbf::Dataset separable_blobs(genrbf::SplitMixRng& rng, int per_class, double gap = 6.0) {
    genrbf::Dataset data;
    for (int cls : {-1, 1}) {
        Eigen::VectorXd center = Eigen::VectorXd::Constant(2, cls * gap / 2.0);
        for (int i = 0; i < per_class; ++i) {
            genrbf::IncompletePoint p;
            p.values = center + random_vector(rng, 2);
            data.points.push_back(std::move(p));
            data.labels.push_back(cls);
        }
    }
    return data;
}

/// Random degenerate-Gaussian representation with the given subspace
/// dimension (0 = Dirac).
inline genrbf::PointRepresentation random_representation(genrbf::SplitMixRng& rng, int ambient,
                                                         int subspace_dim) {
    if (subspace_dim == 0)
        return genrbf::PointRepresentation::dirac_at(random_vector(rng, ambient, 2.0));
    genrbf::PointRepresentation rep;
    rep.mean = random_vector(rng, ambient, 2.0);
    rep.basis = random_basis(rng, ambient, subspace_dim);
    rep.small_cov = random_spd(rng, subspace_dim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rep.small_cov);
    rep.cov_sqrt = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
                   eig.eigenvectors().transpose();
    return rep;
}

}  // namespace testsup

#endif  // GENRBF_TEST_SUPPORT_HPP_
