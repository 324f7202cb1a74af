#ifndef GENRBF_DENSITY_HPP_
#define GENRBF_DENSITY_HPP_

#include <Eigen/Dense>
#include <string>

#include "genrbf/dataset.hpp"

namespace genrbf {

/// Gaussian estimate N(mean, covariance) of the data distribution;
/// `ridge` was added to the covariance diagonal to keep it invertible.
struct GaussianModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    double ridge = 0.0;

    int dim() const { return static_cast<int>(mean.size()); }

    std::string to_json() const;
    static GaussianModel from_json(const std::string& text);
};

struct EmOptions {
    int max_iters = 200;
    double tol = 1e-6;
    // Negative means automatic: 1e-6 * trace(Sigma) / N, recomputed from
    // the initial covariance.
    double ridge = -1.0;
};

/// Maximum-likelihood fit of a multivariate normal to incomplete data by
/// EM. Missing blocks are completed with their conditional moments under
/// the current model; the M-step uses biased (1/n) normalization.
GaussianModel estimate_em(const Dataset& data, const EmOptions& opts = {});

/// Sum over rows of the log marginal density of the observed sub-vector;
/// fully missing rows contribute 0.
double log_likelihood_observed(const Dataset& data, const GaussianModel& model);

}  // namespace genrbf

#endif  // GENRBF_DENSITY_HPP_
