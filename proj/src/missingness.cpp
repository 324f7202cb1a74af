#include "genrbf/missingness.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "genrbf/error.hpp"
#include "genrbf/rng.hpp"

namespace genrbf {

namespace {

// substream labels for the counter-based generator
enum Stream : std::uint64_t {
    kMcarCells = 1,
    kAnchors = 2,
    kCellBernoulli = 3,
    kFeatureSplit = 4,
};

void require_complete(const Dataset& data) {
    data.validate();
    for (const auto& p : data.points)
        if (!p.missing.empty()) throw Error("injector input must be a complete dataset");
}

void require_fraction(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error("missing fraction p must lie in (0,1)");
}

/// First k entries of a seeded permutation of [0, n).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    SplitMixRng rng(seed);
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

Eigen::MatrixXd to_matrix(const Dataset& data, const std::vector<int>& features) {
    Eigen::MatrixXd x(data.size(), features.size());
    for (int r = 0; r < data.size(); ++r)
        for (std::size_t c = 0; c < features.size(); ++c)
            x(r, c) = data.points[r].values[features[c]];
    return x;
}

/// Ridge-regularized sample covariance of the given feature block.
Eigen::MatrixXd regularized_covariance(const Eigen::MatrixXd& x) {
    const int n = static_cast<int>(x.cols());
    Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - mean;
    Eigen::MatrixXd cov = centered.transpose() * centered / x.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        double ridge = 1e-6 * std::max(cov.trace(), 1e-12) / n;
        cov.diagonal().array() += ridge;
    }
    return cov;
}

/// Mahalanobis distances from every row to every anchor row, on the
/// given feature block.
Eigen::MatrixXd anchor_distances(const Eigen::MatrixXd& x, const std::vector<int>& anchors) {
    Eigen::MatrixXd cov = regularized_covariance(x);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        cov.diagonal().array() += 1e-6 * std::max(cov.trace(), 1e-12) / x.cols();
        llt.compute(cov);
        if (llt.info() != Eigen::Success)
            throw NumericError("sample covariance could not be regularized");
    }
    Eigen::MatrixXd dist(x.rows(), anchors.size());
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        Eigen::RowVectorXd anchor = x.row(anchors[a]);
        for (long r = 0; r < x.rows(); ++r) {
            Eigen::VectorXd diff = (x.row(r) - anchor).transpose();
            dist(r, a) = std::sqrt(std::max(diff.dot(llt.solve(diff)), 0.0));
        }
    }
    return dist;
}

/// Bisection on t so the expected removal fraction (mean of the removal
/// probabilities over eligible cells) hits the target.
double calibrate_rate(const Eigen::MatrixXd& dist, const std::vector<bool>& is_anchor,
                      double target) {
    auto expected = [&](double t) {
        double sum = 0.0;
        long cells = 0;
        for (long r = 0; r < dist.rows(); ++r) {
            cells += dist.cols();
            if (is_anchor[r]) continue;  // anchors keep all features
            for (long c = 0; c < dist.cols(); ++c) sum += std::exp(-t * dist(r, c));
        }
        return sum / cells;
    };
    double lo = 1e-4, hi = 1e4;
    if (expected(lo) <= target) return lo;
    if (expected(hi) >= target) return hi;
    for (int it = 0; it < 60; ++it) {
        double mid = std::sqrt(lo * hi);  // bisect in log space
        if (expected(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

}  // namespace

Mechanism mechanism_from_string(const std::string& name) {
    if (name == "mcar" || name == "MCAR") return Mechanism::MCAR;
    if (name == "mar" || name == "MAR") return Mechanism::MAR;
    if (name == "nmar" || name == "NMAR" || name == "mnar" || name == "MNAR")
        return Mechanism::NMAR;
    throw Error("unknown mechanism: " + name);
}

std::string to_string(Mechanism mech) {
    switch (mech) {
        case Mechanism::MCAR: return "mcar";
        case Mechanism::MAR: return "mar";
        case Mechanism::NMAR: return "nmar";
    }
    return "?";
}

std::string InjectionReport::to_json() const {
    nlohmann::json j;
    j["mechanism"] = genrbf::to_string(mechanism);
    j["p"] = target_fraction;
    j["realized_fraction"] = realized_fraction;
    j["t_calibrated"] = rate_t;
    j["seed"] = seed;
    j["anchor_indices"] = anchor_indices;
    j["hidden_features"] = hidden_features;
    j["mahalanobis_norm"] = "unsquared";
    return j.dump(2);
}

Dataset inject_mcar(const Dataset& data, double p, std::uint64_t seed,
                    InjectionReport* report) {
    require_complete(data);
    require_fraction(p);
    const std::size_t rows = data.points.size();
    const std::size_t cols = data.dim();
    const std::size_t cells = rows * cols;
    const std::size_t remove = static_cast<std::size_t>(std::llround(p * cells));

    Dataset out = data;
    auto chosen = sample_without_replacement(cells, remove, hash_combine(seed, kMcarCells));
    for (std::size_t cell : chosen)
        out.points[cell / cols].missing.push_back(static_cast<int>(cell % cols));
    for (auto& pt : out.points) std::sort(pt.missing.begin(), pt.missing.end());

    if (report) {
        *report = {};
        report->mechanism = Mechanism::MCAR;
        report->target_fraction = p;
        report->realized_fraction = out.missing_fraction();
        report->seed = seed;
    }
    return out;
}

Dataset inject_mar(const Dataset& data, double p, std::uint64_t seed,
                   InjectionReport* report) {
    require_complete(data);
    require_fraction(p);
    const int rows = data.size();
    const int n = data.dim();
    if (n > rows) throw Error("MAR needs at least as many rows as features (anchors)");

    std::vector<int> all_features(n);
    std::iota(all_features.begin(), all_features.end(), 0);
    Eigen::MatrixXd x = to_matrix(data, all_features);

    auto anchor_idx = sample_without_replacement(rows, n, hash_combine(seed, kAnchors));
    std::vector<int> anchors(anchor_idx.begin(), anchor_idx.end());
    std::vector<bool> is_anchor(rows, false);
    for (int a : anchors) is_anchor[a] = true;

    Eigen::MatrixXd dist = anchor_distances(x, anchors);
    double t = calibrate_rate(dist, is_anchor, p);

    Dataset out = data;
    for (int r = 0; r < rows; ++r) {
        if (is_anchor[r]) continue;
        for (int i = 0; i < n; ++i) {
            double prob = std::exp(-t * dist(r, i));
            if (uniform_at(seed, kCellBernoulli, static_cast<std::uint64_t>(r) * n + i) < prob)
                out.points[r].missing.push_back(i);
        }
    }

    if (report) {
        *report = {};
        report->mechanism = Mechanism::MAR;
        report->target_fraction = p;
        report->realized_fraction = out.missing_fraction();
        report->rate_t = t;
        report->seed = seed;
        report->anchor_indices = anchors;
    }
    return out;
}

Dataset inject_nmar(const Dataset& data, double p, std::uint64_t seed,
                    InjectionReport* report) {
    require_complete(data);
    require_fraction(p);
    const int rows = data.size();
    const int n = data.dim();
    if (n < 2) throw Error("NMAR needs at least 2 features");
    if (n > rows) throw Error("NMAR needs at least as many rows as features (anchors)");

    // Random split into visible (ceil(N/2)) and hidden features.
    std::vector<int> features(n);
    std::iota(features.begin(), features.end(), 0);
    SplitMixRng split_rng(hash_combine(seed, kFeatureSplit));
    split_rng.shuffle(features);
    const int nv = (n + 1) / 2;
    std::vector<int> visible(features.begin(), features.begin() + nv);
    std::vector<int> hidden(features.begin() + nv, features.end());
    std::sort(visible.begin(), visible.end());
    std::sort(hidden.begin(), hidden.end());

    Eigen::MatrixXd x_hidden = to_matrix(data, hidden);

    auto anchor_idx = sample_without_replacement(rows, n, hash_combine(seed, kAnchors));
    std::vector<int> anchors(anchor_idx.begin(), anchor_idx.end());
    std::vector<bool> is_anchor(rows, false);
    for (int a : anchors) is_anchor[a] = true;

    // One anchor per visible attribute; distances live on the hidden block.
    std::vector<int> visible_anchors(anchors.begin(), anchors.begin() + nv);
    Eigen::MatrixXd dist = anchor_distances(x_hidden, visible_anchors);
    double t = calibrate_rate(dist, is_anchor, p);

    // Project onto the visible block and apply the induced mask.
    Dataset out;
    out.labels = data.labels;
    if (!data.feature_names.empty())
        for (int i : visible) out.feature_names.push_back(data.feature_names[i]);
    out.points.resize(rows);
    for (int r = 0; r < rows; ++r) {
        auto& pt = out.points[r];
        pt.values.resize(nv);
        for (int c = 0; c < nv; ++c) pt.values[c] = data.points[r].values[visible[c]];
        if (is_anchor[r]) continue;
        for (int c = 0; c < nv; ++c) {
            double prob = std::exp(-t * dist(r, c));
            if (uniform_at(seed, kCellBernoulli, static_cast<std::uint64_t>(r) * nv + c) < prob)
                pt.missing.push_back(c);
        }
    }

    if (report) {
        *report = {};
        report->mechanism = Mechanism::NMAR;
        report->target_fraction = p;
        report->realized_fraction = out.missing_fraction();
        report->rate_t = t;
        report->seed = seed;
        report->anchor_indices = visible_anchors;
        report->hidden_features = hidden;
    }
    return out;
}

Dataset inject(const Dataset& data, Mechanism mech, double p, std::uint64_t seed,
               InjectionReport* report) {
    switch (mech) {
        case Mechanism::MCAR: return inject_mcar(data, p, seed, report);
        case Mechanism::MAR: return inject_mar(data, p, seed, report);
        case Mechanism::NMAR: return inject_nmar(data, p, seed, report);
    }
    throw Error("unknown mechanism");
}

}  // namespace genrbf
