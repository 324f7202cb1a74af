#include "genrbf/density.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "genrbf/error.hpp"

namespace genrbf {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

struct RowPartition {
    std::vector<int> observed;
    std::vector<int> missing;
};

RowPartition partition_row(const IncompletePoint& p) {
    RowPartition part;
    part.missing = p.missing;
    part.observed.reserve(p.dim() - p.missing.size());
    for (int j = 0; j < p.dim(); ++j)
        if (!p.is_missing(j)) part.observed.push_back(j);
    return part;
}

Eigen::MatrixXd block(const Eigen::MatrixXd& m, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
    return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    Eigen::VectorXd out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
    return out;
}

}  // namespace

double log_likelihood_observed(const Dataset& data, const GaussianModel& model) {
    if (data.dim() != model.dim()) throw Error("model dimension mismatch");
    double total = 0.0;
    for (const auto& p : data.points) {
        if (p.fully_missing()) continue;
        auto part = partition_row(p);
        const int no = static_cast<int>(part.observed.size());
        Eigen::MatrixXd s_oo = block(model.covariance, part.observed, part.observed);
        Eigen::VectorXd diff = gather(p.values, part.observed) - gather(model.mean, part.observed);
        Eigen::LLT<Eigen::MatrixXd> llt(s_oo);
        if (llt.info() != Eigen::Success)
            throw NumericError("observed covariance block is not positive definite");
        double logdet = 0.0;
        for (int i = 0; i < no; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
        double quad = diff.dot(llt.solve(diff));
        total += -0.5 * (no * kLog2Pi + logdet + quad);
    }
    return total;
}

GaussianModel estimate_em(const Dataset& data, const EmOptions& opts) {
    data.validate();
    const int n = data.dim();
    const int rows = data.size();
    if (rows < 2) throw Error("EM needs at least 2 rows");

    // Initialization: observed-entry means and diagonal variances.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd var = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        double sum = 0.0, sumsq = 0.0;
        long count = 0;
        for (const auto& p : data.points) {
            if (p.is_missing(j)) continue;
            sum += p.values[j];
            sumsq += p.values[j] * p.values[j];
            ++count;
        }
        if (count == 0)
            throw Error("feature #" + std::to_string(j) + " has no observed values");
        mean[j] = sum / count;
        var[j] = std::max(sumsq / count - mean[j] * mean[j], 1e-12);
    }
    Eigen::MatrixXd cov = var.asDiagonal();

    double ridge = opts.ridge;
    if (ridge < 0.0) ridge = 1e-6 * cov.trace() / n;
    cov.diagonal().array() += ridge;

    GaussianModel model{mean, cov, ridge};
    double prev_ll = log_likelihood_observed(data, model);

    std::vector<RowPartition> parts;
    parts.reserve(rows);
    for (const auto& p : data.points) parts.push_back(partition_row(p));

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        Eigen::VectorXd sum_x = Eigen::VectorXd::Zero(n);
        Eigen::MatrixXd sum_xx = Eigen::MatrixXd::Zero(n, n);

        // E-step: complete each row with conditional moments.
        for (int r = 0; r < rows; ++r) {
            const auto& part = parts[r];
            Eigen::VectorXd completed = data.points[r].values;
            if (!part.missing.empty()) {
                Eigen::VectorXd cond_mean;
                Eigen::MatrixXd cond_cov;
                if (part.observed.empty()) {
                    cond_mean = model.mean;
                    cond_cov = model.covariance;
                } else {
                    Eigen::MatrixXd s_oo = block(model.covariance, part.observed, part.observed);
                    Eigen::MatrixXd s_mo = block(model.covariance, part.missing, part.observed);
                    Eigen::MatrixXd s_mm = block(model.covariance, part.missing, part.missing);
                    Eigen::VectorXd diff =
                        gather(data.points[r].values, part.observed) - gather(model.mean, part.observed);
                    Eigen::LLT<Eigen::MatrixXd> llt(s_oo);
                    if (llt.info() != Eigen::Success)
                        throw NumericError("E-step covariance block not positive definite");
                    cond_mean = gather(model.mean, part.missing) + s_mo * llt.solve(diff);
                    cond_cov = s_mm - s_mo * llt.solve(s_mo.transpose());
                }
                for (std::size_t i = 0; i < part.missing.size(); ++i)
                    completed[part.missing[i]] = cond_mean[i];
                for (std::size_t i = 0; i < part.missing.size(); ++i)
                    for (std::size_t j = 0; j < part.missing.size(); ++j)
                        sum_xx(part.missing[i], part.missing[j]) += cond_cov(i, j);
            }
            sum_x += completed;
            sum_xx += completed * completed.transpose();
        }

        // M-step
        model.mean = sum_x / rows;
        model.covariance = sum_xx / rows - model.mean * model.mean.transpose();
        model.covariance = 0.5 * (model.covariance + model.covariance.transpose());
        model.covariance.diagonal().array() += ridge;

        double ll = log_likelihood_observed(data, model);
        if (ll < prev_ll - 10.0 * opts.tol)
            throw NumericError("EM log-likelihood decreased: numerical failure");
        if (ll - prev_ll < opts.tol) break;
        prev_ll = ll;
    }
    return model;
}

std::string GaussianModel::to_json() const {
    nlohmann::json j;
    j["mean"] = std::vector<double>(mean.data(), mean.data() + mean.size());
    std::vector<std::vector<double>> cov(dim());
    for (int r = 0; r < dim(); ++r)
        cov[r].assign(covariance.row(r).begin(), covariance.row(r).end());
    j["covariance"] = cov;
    j["ridge"] = ridge;
    return j.dump(2);
}

GaussianModel GaussianModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    GaussianModel model;
    std::vector<double> m = j.at("mean").get<std::vector<double>>();
    model.mean = Eigen::Map<Eigen::VectorXd>(m.data(), m.size());
    auto cov = j.at("covariance").get<std::vector<std::vector<double>>>();
    model.covariance.resize(cov.size(), cov.size());
    for (std::size_t r = 0; r < cov.size(); ++r) {
        if (cov[r].size() != cov.size()) throw Error("covariance is not square");
        for (std::size_t c = 0; c < cov.size(); ++c) model.covariance(r, c) = cov[r][c];
    }
    model.ridge = j.value("ridge", 0.0);
    if (model.mean.size() != model.covariance.rows()) throw Error("mean/covariance size mismatch");
    return model;
}

}  // namespace genrbf
