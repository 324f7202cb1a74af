#ifndef GENRBF_SVM_HPP_
#define GENRBF_SVM_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "genrbf/kernel.hpp"

namespace genrbf {

/// Soft-margin SVM trained on a precomputed kernel. Alphas are kept for
/// all training points; support_indices lists those with alpha > 0.
struct SvmModel {
    Eigen::VectorXd alphas;       // in [0, C]
    double bias = 0.0;
    std::vector<int> labels;      // +-1 per training point
    std::vector<int> support_indices;
    double C = 1.0;
    KernelParams params{1.0};
    std::vector<PointRepresentation> support_reps;  // optional, for prediction on raw points
    bool converged = true;

    std::string to_json() const;
    static SvmModel from_json(const std::string& text);
};

struct SvmOptions {
    double tol = 1e-3;
    long max_passes = 100000;  // pair updates
};

/// Solves the dual problem by SMO with maximal-violating-pair selection.
/// Throws on single-class labels; a non-converged model is returned with
/// converged = false rather than thrown.
SvmModel train(const GramMatrix& gram, const std::vector<int>& labels, double C,
               const SvmOptions& opts = {});

/// Decision values f = cross * (alpha .* y) + b over the support vectors;
/// `cross` has one column per support vector, in model order.
Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& cross);

/// sign of the decision value, with sign(0) = +1.
std::vector<int> predict(const SvmModel& model, const Eigen::MatrixXd& cross);

}  // namespace genrbf

#endif  // GENRBF_SVM_HPP_
