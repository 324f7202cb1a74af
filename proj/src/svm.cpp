#include "genrbf/svm.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "genrbf/error.hpp"

namespace genrbf {

SvmModel train(const GramMatrix& gram, const std::vector<int>& labels, double C,
               const SvmOptions& opts) {
    const int m = gram.size();
    if (m == 0 || static_cast<int>(labels.size()) != m)
        throw Error("gram/labels size mismatch");
    if (!(C > 0.0)) throw Error("C must be positive");
    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == 1) has_pos = true;
        else if (y == -1) has_neg = true;
        else throw Error("labels must be +-1");
    }
    if (!has_pos || !has_neg) throw Error("training labels contain a single class");

    const Eigen::MatrixXd& k = gram.entries;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m);
    // f_t = sum_s alpha_s y_s K(t,s); bias excluded (cancels in the pair update)
    Eigen::VectorXd f = Eigen::VectorXd::Zero(m);

    auto in_up = [&](int t) {
        return (labels[t] == 1 && alpha[t] < C) || (labels[t] == -1 && alpha[t] > 0);
    };
    auto in_low = [&](int t) {
        return (labels[t] == -1 && alpha[t] < C) || (labels[t] == 1 && alpha[t] > 0);
    };

    bool converged = false;
    long passes = 0;
    while (passes < opts.max_passes) {
        // Maximal violating pair: i minimizes E over I_up, j maximizes E
        // over I_low, with E_t = f_t - y_t.
        int i = -1, j = -1;
        double e_min = std::numeric_limits<double>::infinity();
        double e_max = -std::numeric_limits<double>::infinity();
        for (int t = 0; t < m; ++t) {
            double e = f[t] - labels[t];
            if (in_up(t) && e < e_min) {
                e_min = e;
                i = t;
            }
            if (in_low(t) && e > e_max) {
                e_max = e;
                j = t;
            }
        }
        if (i < 0 || j < 0 || e_max - e_min <= opts.tol) {
            converged = true;
            break;
        }

        const int yi = labels[i], yj = labels[j];
        const double s = yi * yj;
        double lo, hi;
        if (s < 0) {
            lo = std::max(0.0, alpha[j] - alpha[i]);
            hi = std::min(C, C + alpha[j] - alpha[i]);
        } else {
            lo = std::max(0.0, alpha[i] + alpha[j] - C);
            hi = std::min(C, alpha[i] + alpha[j]);
        }
        double eta = k(i, i) + k(j, j) - 2.0 * k(i, j);
        if (eta <= 1e-12) eta = 1e-12;
        double ei = f[i] - yi, ej = f[j] - yj;
        double aj_new = alpha[j] + yj * (ei - ej) / eta;
        aj_new = std::min(hi, std::max(lo, aj_new));
        double ai_new = alpha[i] + s * (alpha[j] - aj_new);
        // numerical snap to the box
        if (ai_new < 1e-12) ai_new = 0.0;
        if (ai_new > C - 1e-12) ai_new = C;

        double di = (ai_new - alpha[i]) * yi;
        double dj = (aj_new - alpha[j]) * yj;
        alpha[i] = ai_new;
        alpha[j] = aj_new;
        f += di * k.col(i) + dj * k.col(j);
        ++passes;
    }

    // Bias from free support vectors; midpoint of the feasible interval
    // when none are free.
    double bias;
    {
        double sum = 0.0;
        int free_count = 0;
        for (int t = 0; t < m; ++t)
            if (alpha[t] > 1e-10 && alpha[t] < C - 1e-10) {
                sum += labels[t] - f[t];
                ++free_count;
            }
        if (free_count > 0) {
            bias = sum / free_count;
        } else {
            double lo = -std::numeric_limits<double>::infinity();
            double hi = std::numeric_limits<double>::infinity();
            for (int t = 0; t < m; ++t) {
                double c = labels[t] - f[t];
                if (in_up(t)) lo = std::max(lo, c);
                if (in_low(t)) hi = std::min(hi, c);
            }
            if (!std::isfinite(lo)) bias = hi;
            else if (!std::isfinite(hi)) bias = lo;
            else bias = 0.5 * (lo + hi);
        }
    }

    SvmModel model;
    model.alphas = alpha;
    model.bias = bias;
    model.labels = labels;
    model.C = C;
    model.converged = converged;
    for (int t = 0; t < m; ++t)
        if (alpha[t] > 0.0) model.support_indices.push_back(t);
    return model;
}

Eigen::VectorXd decision_values(const SvmModel& model, const Eigen::MatrixXd& cross) {
    if (cross.cols() != static_cast<long>(model.support_indices.size()))
        throw Error("cross matrix must have one column per support vector");
    Eigen::VectorXd coeff(model.support_indices.size());
    for (std::size_t s = 0; s < model.support_indices.size(); ++s) {
        int t = model.support_indices[s];
        coeff[s] = model.alphas[t] * model.labels[t];
    }
    return (cross * coeff).array() + model.bias;
}

std::vector<int> predict(const SvmModel& model, const Eigen::MatrixXd& cross) {
    Eigen::VectorXd dec = decision_values(model, cross);
    std::vector<int> out(dec.size());
    for (long i = 0; i < dec.size(); ++i) out[i] = dec[i] < 0.0 ? -1 : 1;
    return out;
}

std::string SvmModel::to_json() const {
    nlohmann::json j;
    j["alphas"] = std::vector<double>(alphas.data(), alphas.data() + alphas.size());
    j["bias"] = bias;
    j["labels"] = labels;
    j["support_indices"] = support_indices;
    j["C"] = C;
    j["gamma"] = params.gamma;
    j["converged"] = converged;
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& rep : support_reps) {
        nlohmann::json r;
        r["mean"] = std::vector<double>(rep.mean.data(), rep.mean.data() + rep.mean.size());
        std::vector<std::vector<double>> basis(rep.dim());
        for (int i = 0; i < rep.dim(); ++i)
            basis[i].assign(rep.basis.row(i).begin(), rep.basis.row(i).end());
        r["basis"] = basis;
        std::vector<std::vector<double>> sc(rep.subspace_dim());
        for (int i = 0; i < rep.subspace_dim(); ++i)
            sc[i].assign(rep.small_cov.row(i).begin(), rep.small_cov.row(i).end());
        r["small_cov"] = sc;
        reps.push_back(std::move(r));
    }
    j["support_reps"] = std::move(reps);
    return j.dump(2);
}

SvmModel SvmModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    SvmModel model;
    auto a = j.at("alphas").get<std::vector<double>>();
    model.alphas = Eigen::Map<Eigen::VectorXd>(a.data(), a.size());
    model.bias = j.at("bias").get<double>();
    model.labels = j.at("labels").get<std::vector<int>>();
    model.support_indices = j.at("support_indices").get<std::vector<int>>();
    model.C = j.at("C").get<double>();
    model.params.gamma = j.at("gamma").get<double>();
    model.converged = j.value("converged", true);
    for (const auto& r : j.at("support_reps")) {
        PointRepresentation rep;
        auto mv = r.at("mean").get<std::vector<double>>();
        rep.mean = Eigen::Map<Eigen::VectorXd>(mv.data(), mv.size());
        auto basis = r.at("basis").get<std::vector<std::vector<double>>>();
        int n = basis.empty() ? 0 : static_cast<int>(basis[0].size());
        rep.basis.resize(basis.size(), n);
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (int c = 0; c < n; ++c) rep.basis(i, c) = basis[i][c];
        auto sc = r.at("small_cov").get<std::vector<std::vector<double>>>();
        rep.small_cov.resize(sc.size(), sc.size());
        for (std::size_t i = 0; i < sc.size(); ++i)
            for (std::size_t c = 0; c < sc.size(); ++c) rep.small_cov(i, c) = sc[i][c];
        if (rep.small_cov.rows() > 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rep.small_cov);
            rep.cov_sqrt = eig.eigenvectors() *
                           eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                           eig.eigenvectors().transpose();
        } else {
            rep.cov_sqrt.resize(0, 0);
        }
        model.support_reps.push_back(std::move(rep));
    }
    return model;
}

}  // namespace genrbf
