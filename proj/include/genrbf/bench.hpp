#ifndef GENRBF_BENCH_HPP_
#define GENRBF_BENCH_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "genrbf/dataset.hpp"
#include "genrbf/density.hpp"
#include "genrbf/missingness.hpp"
#include "genrbf/svm.hpp"

namespace genrbf {

struct ExperimentConfig {
    std::vector<double> c_grid;
    std::vector<double> gamma_grid;
    int outer_folds = 5;
    int inner_folds = 5;
    int repetitions = 10;
    std::vector<std::string> methods{"genrbf", "zero", "mean"};
    std::uint64_t seed = 0;
    EmOptions em;
    SvmOptions svm;

    /// Default grids: C in {2^k : k = -5,-3,...,9}, gamma in {2^k : k = -5,-3,...,15}.
    static ExperimentConfig default_grids();

    void validate() const;
    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
};

struct FoldDetail {
    int fold;
    double C;
    double gamma;
    double accuracy;
};

struct CvResult {
    double mean_accuracy = 0.0;
    std::vector<FoldDetail> folds;
};

/// Nested cross validation: hyperparameters are tuned on inner folds of
/// each outer training split; every fitted quantity (standardization,
/// Gaussian model, imputation means) sees training-side data only.
CvResult run_cv(const Dataset& data, const std::string& method, const ExperimentConfig& config);

/// Fills every missing entry with 0 and clears the masks.
Dataset impute_zero(const Dataset& data);

/// Fills every missing entry with the given per-feature means
/// (computed from the training split's observed entries).
Dataset impute_mean(const Dataset& data, const Eigen::VectorXd& feature_means);

/// Observed-entry per-feature means, for impute_mean.
Eigen::VectorXd observed_means(const Dataset& data);

/// Deterministic stratified fold assignment; preserves class proportions.
std::vector<int> stratified_folds(const std::vector<int>& labels, int n_folds,
                                  std::uint64_t seed);

struct BenchmarkRow {
    std::string dataset;
    std::string mechanism;
    double p;
    std::string method;
    int repetition;
    int fold;
    double C;
    double gamma;
    double accuracy;
};

struct CellSummary {
    double mean_accuracy = 0.0;
    double sd_accuracy = 0.0;
    int repetitions = 0;
    double wall_seconds = 0.0;
    std::string error;  // non-empty when the cell failed
};

struct BenchmarkResult {
    std::vector<BenchmarkRow> rows;
    // key: dataset|mechanism|p|method
    std::map<std::string, CellSummary> summary;

    static std::string key(const std::string& dataset, const std::string& mechanism, double p,
                           const std::string& method);
    bool any_errors() const;
    void write_csv(const std::string& path) const;
    std::string summary_json() const;
};

/// Full protocol: inject missingness per repetition seed, run nested CV
/// for every method, aggregate over repetitions. A failing cell becomes
/// an error entry rather than aborting the run. p = 0 skips injection.
BenchmarkResult run_benchmark(const std::vector<std::pair<std::string, Dataset>>& datasets,
                              const std::vector<Mechanism>& mechanisms,
                              const std::vector<double>& fractions,
                              const ExperimentConfig& config);

}  // namespace genrbf

#endif  // GENRBF_BENCH_HPP_
