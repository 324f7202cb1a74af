#ifndef GENRBF_STATS_HPP_
#define GENRBF_STATS_HPP_

#include <string>
#include <vector>

namespace genrbf {

/// Per-configuration ranks (1 = best), midranks on ties. Rows are
/// configurations, columns are methods.
struct RankTable {
    std::vector<std::string> methods;
    std::vector<std::vector<double>> ranks;  // each row sums to k(k+1)/2
    std::vector<double> mean_ranks;          // per method

    int rows() const { return static_cast<int>(ranks.size()); }
    int cols() const { return static_cast<int>(methods.size()); }
};

struct FriedmanResult {
    double statistic;
    int degrees_of_freedom;
    double p_value;
};

/// Ranks one row of accuracies, descending, with midranks on ties.
std::vector<double> rank_row(const std::vector<double>& accuracies);

/// Builds a rank table from an accuracy matrix (rows = configurations).
RankTable rank_methods(const std::vector<std::string>& methods,
                       const std::vector<std::vector<double>>& accuracies);

FriedmanResult friedman_test(const RankTable& table);

/// Nemenyi critical difference q_alpha * sqrt(k(k+1)/(6n)).
/// alpha must be 0.05 or 0.10; k in [2, 10].
double nemenyi_cd(int k, int n, double alpha);

/// Partitions methods (ordered by mean rank) into maximal groups whose
/// mean-rank spread is below the critical difference.
std::vector<std::vector<int>> nemenyi_groups(const std::vector<double>& mean_ranks, double cd);

/// Survival function of the chi-squared distribution.
double chi_squared_sf(double x, int dof);

}  // namespace genrbf

#endif  // GENRBF_STATS_HPP_
