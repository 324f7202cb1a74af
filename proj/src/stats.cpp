#include "genrbf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "genrbf/error.hpp"

namespace genrbf {

namespace {

/// Regularized lower incomplete gamma P(a, x), series expansion.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper incomplete gamma Q(a, x), Lentz continued fraction.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_squared_sf(double x, int dof) {
    if (dof < 1) throw Error("degrees of freedom must be positive");
    if (x <= 0.0) return 1.0;
    double a = 0.5 * dof;
    double half_x = 0.5 * x;
    // series converges fast for x < a+1, continued fraction otherwise
    if (half_x < a + 1.0) return 1.0 - gamma_p_series(a, half_x);
    return gamma_q_cf(a, half_x);
}

std::vector<double> rank_row(const std::vector<double>& accuracies) {
    const int k = static_cast<int>(accuracies.size());
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return accuracies[a] > accuracies[b]; });
    std::vector<double> ranks(k);
    int i = 0;
    while (i < k) {
        int j = i;
        while (j + 1 < k && accuracies[order[j + 1]] == accuracies[order[i]]) ++j;
        double midrank = 0.5 * (i + j) + 1.0;  // ranks are 1-based
        for (int t = i; t <= j; ++t) ranks[order[t]] = midrank;
        i = j + 1;
    }
    return ranks;
}

RankTable rank_methods(const std::vector<std::string>& methods,
                       const std::vector<std::vector<double>>& accuracies) {
    const int k = static_cast<int>(methods.size());
    if (k < 1) throw Error("no methods to rank");
    RankTable table;
    table.methods = methods;
    table.mean_ranks.assign(k, 0.0);
    for (std::size_t r = 0; r < accuracies.size(); ++r) {
        if (static_cast<int>(accuracies[r].size()) != k)
            throw Error("configuration " + std::to_string(r) +
                        " is missing an accuracy for some method");
        table.ranks.push_back(rank_row(accuracies[r]));
        for (int j = 0; j < k; ++j) table.mean_ranks[j] += table.ranks.back()[j];
    }
    if (!table.ranks.empty())
        for (int j = 0; j < k; ++j) table.mean_ranks[j] /= static_cast<double>(table.ranks.size());
    return table;
}

FriedmanResult friedman_test(const RankTable& table) {
    const int n = table.rows();
    const int k = table.cols();
    if (n < 2 || k < 2) throw Error("Friedman test needs at least 2 rows and 2 methods");
    double sum_sq = 0.0;
    for (double r : table.mean_ranks) sum_sq += r * r;
    double statistic =
        12.0 * n / (k * (k + 1.0)) * (sum_sq - k * (k + 1.0) * (k + 1.0) / 4.0);
    FriedmanResult result;
    result.statistic = statistic;
    result.degrees_of_freedom = k - 1;
    result.p_value = chi_squared_sf(statistic, k - 1);
    return result;
}

double nemenyi_cd(int k, int n, double alpha) {
    // Studentized-range constants q_alpha / sqrt(2) for comparing k
    // classifiers, the tabulation standard in this literature.
    static const double q05[] = {0, 0, 1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164};
    static const double q10[] = {0, 0, 1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920};
    if (k < 2 || k > 10) throw Error("Nemenyi table covers 2 <= k <= 10");
    if (n < 1) throw Error("need at least one configuration row");
    const double* q;
    if (alpha == 0.05)
        q = q05;
    else if (alpha == 0.10)
        q = q10;
    else
        throw Error("alpha must be 0.05 or 0.10");
    return q[k] * std::sqrt(k * (k + 1.0) / (6.0 * n));
}

std::vector<std::vector<int>> nemenyi_groups(const std::vector<double>& mean_ranks, double cd) {
    const int k = static_cast<int>(mean_ranks.size());
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return mean_ranks[a] < mean_ranks[b]; });
    // maximal intervals (in rank order) of spread < cd, dropping intervals
    // contained in a larger one
    std::vector<std::vector<int>> groups;
    int last_end = -1;
    for (int i = 0; i < k; ++i) {
        int j = i;
        while (j + 1 < k && mean_ranks[order[j + 1]] - mean_ranks[order[i]] < cd) ++j;
        if (j > last_end) {
            groups.emplace_back(order.begin() + i, order.begin() + j + 1);
            last_end = j;
        }
    }
    return groups;
}

}  // namespace genrbf
