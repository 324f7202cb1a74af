#include "genrbf/kernel.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "genrbf/error.hpp"
#include "genrbf/parallel.hpp"

namespace genrbf {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

/// log det(I_n + c * S) through a Cholesky factorization; S is SPD and
/// c > 0, so the argument is SPD as well.
double logdet_i_plus(const Eigen::MatrixXd& s, double c) {
    const int n = static_cast<int>(s.rows());
    if (n == 0) return 0.0;
    Eigen::MatrixXd m = c * s;
    m.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw NumericError("log-determinant factor lost positive definiteness");
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return logdet;
}

}  // namespace

double kernel_value(const PointRepresentation& a, const PointRepresentation& b,
                    const KernelParams& params) {
    if (a.dim() != b.dim()) throw Error("kernel operands have different dimensions");
    if (!(params.gamma > 0.0)) throw Error("gamma must be positive");
    const double gamma = params.gamma;
    const int N = a.dim();
    const int na = a.subspace_dim();
    const int nb = b.subspace_dim();

    Eigen::VectorXd diff = a.mean - b.mean;

    double quad;
    if (na == 0 && nb == 0) {
        quad = 2.0 * gamma * diff.squaredNorm();
    } else {
        Eigen::MatrixXd sigma_hat = ambient_cov(a) + ambient_cov(b);
        sigma_hat.diagonal().array() += 1.0 / (2.0 * gamma);
        Eigen::LLT<Eigen::MatrixXd> llt(sigma_hat);
        if (llt.info() != Eigen::Success)
            throw NumericError("regularized covariance lost positive definiteness");
        quad = diff.dot(llt.solve(diff));
    }

    // Determinant factors in log space; the low-rank identity
    // det(I_N + c v S v^T) = det(I_n + c S) keeps everything at the
    // subspace dimensions.
    double log_z = 0.0;
    if (na > 0) log_z += 0.25 * logdet_i_plus(a.small_cov, 4.0 * gamma);
    if (nb > 0) log_z += 0.25 * logdet_i_plus(b.small_cov, 4.0 * gamma);
    if (na + nb > 0) {
        Eigen::MatrixXd u(N, na + nb);
        if (na > 0) u.leftCols(na) = a.basis * a.cov_sqrt;
        if (nb > 0) u.rightCols(nb) = b.basis * b.cov_sqrt;
        log_z -= 0.5 * logdet_i_plus(u.transpose() * u, 2.0 * gamma);
    }

    double value = std::exp(log_z - 0.5 * quad);
    if (!std::isfinite(value))
        throw NumericError("kernel value overflowed in the normalization factor");
    return value;
}

double gaussian_l2_inner(const Eigen::VectorXd& m1, const Eigen::MatrixXd& s1,
                         const Eigen::VectorXd& m2, const Eigen::MatrixXd& s2) {
    if (m1.size() != m2.size() || s1.rows() != m1.size() || s2.rows() != m2.size())
        throw Error("gaussian_l2_inner dimension mismatch");
    const int n = static_cast<int>(m1.size());
    Eigen::MatrixXd sum = s1 + s2;
    Eigen::LLT<Eigen::MatrixXd> llt(sum);
    if (llt.info() != Eigen::Success)
        throw NumericError("covariance sum is not positive definite");
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    Eigen::VectorXd diff = m1 - m2;
    double quad = diff.dot(llt.solve(diff));
    return std::exp(-0.5 * (n * kLog2Pi + logdet + quad));
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> embed_regularize(const PointRepresentation& rep,
                                                             const KernelParams& params) {
    if (!(params.gamma > 0.0)) throw Error("gamma must be positive");
    const double sigma2 = 1.0 / (4.0 * params.gamma);
    Eigen::MatrixXd cov = ambient_cov(rep);
    cov.diagonal().array() += sigma2;
    return {rep.mean, cov};
}

GramMatrix gram(const std::vector<PointRepresentation>& reps, const KernelParams& params) {
    const int m = static_cast<int>(reps.size());
    GramMatrix out;
    out.entries = Eigen::MatrixXd::Zero(m, m);
    parallel_for(m, [&](std::size_t i) {
        out.entries(i, i) = 1.0;  // guaranteed by the normalization
        for (int j = static_cast<int>(i) + 1; j < m; ++j) {
            double v = kernel_value(reps[i], reps[j], params);
            out.entries(i, j) = v;
            out.entries(j, i) = v;
        }
    });
    return out;
}

Eigen::MatrixXd gram_cross(const std::vector<PointRepresentation>& rows,
                           const std::vector<PointRepresentation>& cols,
                           const KernelParams& params) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    parallel_for(rows.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(i, j) = kernel_value(rows[i], cols[j], params);
    });
    return out;
}

void save_gram_csv(const GramMatrix& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open file for writing: " + path);
    out.precision(17);
    for (int i = 0; i < g.size(); ++i) {
        for (int j = 0; j < g.size(); ++j) {
            if (j) out << ',';
            out << g.entries(i, j);
        }
        out << '\n';
    }
}

void save_gram_binary(const GramMatrix& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open file for writing: " + path);
    out.write("GRBF", 4);
    std::uint32_t m = static_cast<std::uint32_t>(g.size());
    out.write(reinterpret_cast<const char*>(&m), 4);
    for (int i = 0; i < g.size(); ++i)
        for (int j = i; j < g.size(); ++j) {
            double v = g.entries(i, j);
            out.write(reinterpret_cast<const char*>(&v), 8);
        }
}

GramMatrix load_gram_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "GRBF") throw Error("bad magic in gram file");
    std::uint32_t m = 0;
    in.read(reinterpret_cast<char*>(&m), 4);
    GramMatrix g;
    g.entries.resize(m, m);
    for (std::uint32_t i = 0; i < m; ++i)
        for (std::uint32_t j = i; j < m; ++j) {
            double v;
            in.read(reinterpret_cast<char*>(&v), 8);
            if (!in) throw Error("truncated gram file");
            g.entries(i, j) = v;
            g.entries(j, i) = v;
        }
    return g;
}

}  // namespace genrbf
