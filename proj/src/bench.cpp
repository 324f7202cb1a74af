#include "genrbf/bench.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "genrbf/error.hpp"
#include "genrbf/kernel.hpp"
#include "genrbf/representation.hpp"
#include "genrbf/rng.hpp"
#include "genrbf/subspace.hpp"

namespace genrbf {

namespace {

enum SeedStream : std::uint64_t {
    kOuterFolds = 101,
    kInnerFolds = 102,
    kInjection = 103,
    kCvSeed = 104,
};

double accuracy_of(const std::vector<int>& predicted, const std::vector<int>& truth) {
    int correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (predicted[i] == truth[i]) ++correct;
    return truth.empty() ? 0.0 : static_cast<double>(correct) / truth.size();
}

/// Representations of train and eval rows for one method, fitted on the
/// training split only.
struct MethodContext {
    std::vector<PointRepresentation> train_reps;
    std::vector<PointRepresentation> eval_reps;
};

MethodContext build_context(const std::string& method, const Dataset& train,
                            const Dataset& eval, const EmOptions& em_opts) {
    StandardizationParams std_params = fit_standardization(train);
    Dataset train_std = apply_standardization(train, std_params);
    Dataset eval_std = apply_standardization(eval, std_params);

    MethodContext ctx;
    if (method == "genrbf") {
        GaussianModel model = estimate_em(train_std, em_opts);
        ctx.train_reps = condition_all(model, from_dataset(train_std));
        ctx.eval_reps = condition_all(model, from_dataset(eval_std));
    } else if (method == "zero") {
        for (const auto& p : impute_zero(train_std).points)
            ctx.train_reps.push_back(PointRepresentation::dirac_at(p.values));
        for (const auto& p : impute_zero(eval_std).points)
            ctx.eval_reps.push_back(PointRepresentation::dirac_at(p.values));
    } else if (method == "mean") {
        Eigen::VectorXd means = observed_means(train_std);
        for (const auto& p : impute_mean(train_std, means).points)
            ctx.train_reps.push_back(PointRepresentation::dirac_at(p.values));
        for (const auto& p : impute_mean(eval_std, means).points)
            ctx.eval_reps.push_back(PointRepresentation::dirac_at(p.values));
    } else {
        throw Error("unknown method: " + method);
    }
    return ctx;
}

GramMatrix slice_gram(const GramMatrix& full, const std::vector<int>& idx) {
    GramMatrix out;
    out.entries.resize(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j)
            out.entries(i, j) = full.entries(idx[i], idx[j]);
    return out;
}

Eigen::MatrixXd slice_cross(const GramMatrix& full, const std::vector<int>& rows,
                            const std::vector<int>& cols) {
    Eigen::MatrixXd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(i, j) = full.entries(rows[i], cols[j]);
    return out;
}

std::vector<int> gather_labels(const std::vector<int>& labels, const std::vector<int>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(labels[i]);
    return out;
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double sd_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / v.size());
}

}  // namespace

ExperimentConfig ExperimentConfig::default_grids() {
    ExperimentConfig cfg;
    for (int k = -5; k <= 9; k += 2) cfg.c_grid.push_back(std::ldexp(1.0, k));
    for (int k = -5; k <= 15; k += 2) cfg.gamma_grid.push_back(std::ldexp(1.0, k));
    return cfg;
}

void ExperimentConfig::validate() const {
    if (c_grid.empty() || gamma_grid.empty()) throw Error("hyperparameter grids must be nonempty");
    if (outer_folds < 2 || inner_folds < 2) throw Error("folds must be >= 2");
    if (repetitions < 1) throw Error("repetitions must be >= 1");
    if (methods.empty()) throw Error("method list must be nonempty");
    for (double c : c_grid)
        if (!(c > 0)) throw Error("C values must be positive");
    for (double g : gamma_grid)
        if (!(g > 0)) throw Error("gamma values must be positive");
}

std::string ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["c_grid"] = c_grid;
    j["gamma_grid"] = gamma_grid;
    j["outer_folds"] = outer_folds;
    j["inner_folds"] = inner_folds;
    j["repetitions"] = repetitions;
    j["methods"] = methods;
    j["seed"] = seed;
    j["em"] = {{"max_iters", em.max_iters}, {"tol", em.tol}, {"ridge", em.ridge}};
    j["svm"] = {{"tol", svm.tol}, {"max_passes", svm.max_passes}};
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ExperimentConfig cfg;
    cfg.c_grid = j.at("c_grid").get<std::vector<double>>();
    cfg.gamma_grid = j.at("gamma_grid").get<std::vector<double>>();
    cfg.outer_folds = j.value("outer_folds", 5);
    cfg.inner_folds = j.value("inner_folds", 5);
    cfg.repetitions = j.value("repetitions", 10);
    if (j.contains("methods")) cfg.methods = j.at("methods").get<std::vector<std::string>>();
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("em")) {
        cfg.em.max_iters = j["em"].value("max_iters", cfg.em.max_iters);
        cfg.em.tol = j["em"].value("tol", cfg.em.tol);
        cfg.em.ridge = j["em"].value("ridge", cfg.em.ridge);
    }
    if (j.contains("svm")) {
        cfg.svm.tol = j["svm"].value("tol", cfg.svm.tol);
        cfg.svm.max_passes = j["svm"].value("max_passes", cfg.svm.max_passes);
    }
    cfg.validate();
    return cfg;
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int n_folds,
                                  std::uint64_t seed) {
    std::vector<int> fold(labels.size(), -1);
    for (int cls : {-1, 1}) {
        std::vector<int> idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) idx.push_back(static_cast<int>(i));
        SplitMixRng rng(hash_combine(seed, cls == 1 ? 1 : 2));
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i)
            fold[idx[i]] = static_cast<int>(i % n_folds);
    }
    return fold;
}

Dataset impute_zero(const Dataset& data) {
    Dataset out = data;
    for (auto& p : out.points) {
        for (int j : p.missing) p.values[j] = 0.0;
        p.missing.clear();
    }
    return out;
}

Eigen::VectorXd observed_means(const Dataset& data) {
    const int n = data.dim();
    Eigen::VectorXd means = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        long count = 0;
        for (const auto& p : data.points) {
            if (p.is_missing(j)) continue;
            sum += p.values[j];
            ++count;
        }
        if (count == 0) throw Error("feature #" + std::to_string(j) + " has no observed values");
        means[j] = sum / count;
    }
    return means;
}

Dataset impute_mean(const Dataset& data, const Eigen::VectorXd& feature_means) {
    if (feature_means.size() != data.dim()) throw Error("means dimension mismatch");
    Dataset out = data;
    for (auto& p : out.points) {
        for (int j : p.missing) p.values[j] = feature_means[j];
        p.missing.clear();
    }
    return out;
}

CvResult run_cv(const Dataset& data, const std::string& method, const ExperimentConfig& config) {
    config.validate();
    data.validate();
    const int rows = data.size();

    std::vector<int> outer = stratified_folds(data.labels, config.outer_folds,
                                              hash_combine(config.seed, kOuterFolds));

    std::vector<double> sorted_c = config.c_grid;
    std::vector<double> sorted_gamma = config.gamma_grid;
    std::sort(sorted_c.begin(), sorted_c.end());
    std::sort(sorted_gamma.begin(), sorted_gamma.end());

    CvResult result;
    for (int of = 0; of < config.outer_folds; ++of) {
        std::vector<int> train_idx, test_idx;
        for (int i = 0; i < rows; ++i)
            (outer[i] == of ? test_idx : train_idx).push_back(i);

        {
            bool pos = false, neg = false;
            for (int i : train_idx) (data.labels[i] == 1 ? pos : neg) = true;
            if (!pos || !neg)
                throw Error("class absent from an outer training fold: "
                            "stratification failed (too few samples per class?)");
        }

        Dataset train_split = data.subset(train_idx);
        Dataset test_split = data.subset(test_idx);
        MethodContext ctx = build_context(method, train_split, test_split, config.em);

        // One full training Gram per gamma, sliced for the inner folds.
        std::vector<GramMatrix> grams;
        grams.reserve(sorted_gamma.size());
        for (double gamma : sorted_gamma)
            grams.push_back(gram(ctx.train_reps, KernelParams{gamma}));

        std::vector<int> inner = stratified_folds(
            train_split.labels, config.inner_folds,
            hash3(config.seed, kInnerFolds, static_cast<std::uint64_t>(of)));
        std::vector<std::vector<int>> inner_train(config.inner_folds),
            inner_val(config.inner_folds);
        for (std::size_t i = 0; i < inner.size(); ++i)
            for (int inf = 0; inf < config.inner_folds; ++inf)
                (inner[i] == inf ? inner_val : inner_train)[inf].push_back(static_cast<int>(i));

        // Grid search on inner-CV mean accuracy. Iterating C then gamma in
        // ascending order with a strict improvement test makes ties break
        // toward the smallest C, then the smallest gamma.
        double best_acc = -1.0;
        std::size_t best_gi = 0;
        double best_c = sorted_c.front();
        for (std::size_t gi = 0; gi < sorted_gamma.size(); ++gi) {
            const GramMatrix& full = grams[gi];
            for (double c : sorted_c) {
                double acc_sum = 0.0;
                for (int inf = 0; inf < config.inner_folds; ++inf) {
                    const auto& itr = inner_train[inf];
                    const auto& iva = inner_val[inf];
                    GramMatrix sub = slice_gram(full, itr);
                    SvmModel model = train(sub, gather_labels(train_split.labels, itr), c, config.svm);
                    std::vector<int> sv_rows;
                    for (int s : model.support_indices) sv_rows.push_back(itr[s]);
                    Eigen::MatrixXd cross = slice_cross(full, iva, sv_rows);
                    acc_sum += accuracy_of(predict(model, cross),
                                           gather_labels(train_split.labels, iva));
                }
                double mean_acc = acc_sum / config.inner_folds;
                bool better = mean_acc > best_acc + 1e-15;
                if (!better && std::abs(mean_acc - best_acc) <= 1e-15) {
                    // tie: smaller C wins, then smaller gamma
                    better = (c < best_c) || (c == best_c && gi < best_gi);
                }
                if (better) {
                    best_acc = mean_acc;
                    best_gi = gi;
                    best_c = c;
                }
            }
        }

        // Retrain on the full outer-train split with the selected pair.
        const GramMatrix& full = grams[best_gi];
        SvmModel model = train(full, train_split.labels, best_c, config.svm);
        std::vector<PointRepresentation> sv_reps;
        for (int s : model.support_indices) sv_reps.push_back(ctx.train_reps[s]);
        Eigen::MatrixXd cross =
            gram_cross(ctx.eval_reps, sv_reps, KernelParams{sorted_gamma[best_gi]});
        double acc = accuracy_of(predict(model, cross), test_split.labels);

        result.folds.push_back({of, best_c, sorted_gamma[best_gi], acc});
        result.mean_accuracy += acc;
    }
    result.mean_accuracy /= config.outer_folds;
    return result;
}

std::string BenchmarkResult::key(const std::string& dataset, const std::string& mechanism,
                                 double p, const std::string& method) {
    std::ostringstream out;
    out << dataset << '|' << mechanism << '|' << p << '|' << method;
    return out.str();
}

bool BenchmarkResult::any_errors() const {
    for (const auto& [k, cell] : summary)
        if (!cell.error.empty()) return true;
    return false;
}

void BenchmarkResult::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot open file for writing: " + path);
    out.precision(12);
    out << "dataset,mechanism,p,method,repetition,fold,C,gamma,accuracy\n";
    for (const auto& r : rows)
        out << r.dataset << ',' << r.mechanism << ',' << r.p << ',' << r.method << ','
            << r.repetition << ',' << r.fold << ',' << r.C << ',' << r.gamma << ','
            << r.accuracy << '\n';
}

std::string BenchmarkResult::summary_json() const {
    nlohmann::json j;
    for (const auto& [k, cell] : summary) {
        nlohmann::json c;
        c["mean_accuracy"] = cell.mean_accuracy;
        c["sd_accuracy"] = cell.sd_accuracy;
        c["repetitions"] = cell.repetitions;
        c["wall_seconds"] = cell.wall_seconds;
        if (!cell.error.empty()) c["error"] = cell.error;
        j[k] = std::move(c);
    }
    return j.dump(2);
}

BenchmarkResult run_benchmark(const std::vector<std::pair<std::string, Dataset>>& datasets,
                              const std::vector<Mechanism>& mechanisms,
                              const std::vector<double>& fractions,
                              const ExperimentConfig& config) {
    config.validate();
    BenchmarkResult result;

    for (std::size_t di = 0; di < datasets.size(); ++di) {
        const auto& [name, clean] = datasets[di];
        for (std::size_t mi = 0; mi < mechanisms.size(); ++mi) {
            Mechanism mech = mechanisms[mi];
            for (std::size_t pi = 0; pi < fractions.size(); ++pi) {
                double p = fractions[pi];
                for (const std::string& method : config.methods) {
                    CellSummary cell;
                    std::vector<double> rep_acc;
                    auto t0 = std::chrono::steady_clock::now();
                    try {
                        for (int rep = 0; rep < config.repetitions; ++rep) {
                            std::uint64_t cell_seed = hash3(
                                hash3(config.seed, kInjection, di),
                                mi * 1000 + pi, static_cast<std::uint64_t>(rep));
                            Dataset corrupted =
                                p == 0.0 ? clean : inject(clean, mech, p, cell_seed);
                            ExperimentConfig cv_cfg = config;
                            cv_cfg.seed = hash_combine(cell_seed, kCvSeed);
                            CvResult cv = run_cv(corrupted, method, cv_cfg);
                            rep_acc.push_back(cv.mean_accuracy);
                            for (const auto& f : cv.folds)
                                result.rows.push_back({name, to_string(mech), p, method, rep,
                                                       f.fold, f.C, f.gamma, f.accuracy});
                        }
                        cell.mean_accuracy = mean_of(rep_acc);
                        cell.sd_accuracy = sd_of(rep_acc);
                        cell.repetitions = static_cast<int>(rep_acc.size());
                    } catch (const std::exception& ex) {
                        cell.error = ex.what();
                    }
                    cell.wall_seconds =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
                    result.summary[BenchmarkResult::key(name, to_string(mech), p, method)] =
                        cell;
                }
            }
        }
    }
    return result;
}

}  // namespace genrbf
