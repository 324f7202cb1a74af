#ifndef GENRBF_DATASET_HPP_
#define GENRBF_DATASET_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace genrbf {

/// A real vector with a designated set of missing coordinates.
/// Entries at missing indices hold an unspecified sentinel; downstream
/// code must branch on the index set, never on the stored value.
struct IncompletePoint {
    Eigen::VectorXd values;
    std::vector<int> missing;  // sorted, each < values.size()

    bool is_missing(int j) const {
        return std::binary_search(missing.begin(), missing.end(), j);
    }
    bool complete() const { return missing.empty(); }
    bool fully_missing() const {
        return static_cast<int>(missing.size()) == values.size();
    }
    int dim() const { return static_cast<int>(values.size()); }
};

struct Dataset {
    std::vector<IncompletePoint> points;
    std::vector<int> labels;  // each -1 or +1, same length as points
    std::vector<std::string> feature_names;  // optional, empty or length N

    int size() const { return static_cast<int>(points.size()); }
    int dim() const { return points.empty() ? 0 : points.front().dim(); }

    /// Total missing cells / total cells.
    double missing_fraction() const;

    /// Throws on any violated invariant (length mismatch, bad label,
    /// unsorted or out-of-range missing index, non-finite observed entry).
    void validate() const;

    Dataset subset(const std::vector<int>& row_indices) const;
};

/// Per-feature z-scoring parameters fitted on observed entries only.
struct StandardizationParams {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;  // each >= kSdFloor

    static constexpr double kSdFloor = 1e-8;
};

Dataset load_csv(const std::string& path, const std::set<std::string>& missing_tokens,
                 const std::string& label_column);
Dataset load_csv(const std::string& path);  // tokens {NA, ?, ""}, last column label

/// Serializes with "NA" as the canonical missing token. Labels written
/// back as -1/+1 in the last column.
void save_csv(const Dataset& data, const std::string& path);

StandardizationParams fit_standardization(const Dataset& data);
Dataset apply_standardization(const Dataset& data, const StandardizationParams& params);
Dataset invert_standardization(const Dataset& data, const StandardizationParams& params);

}  // namespace genrbf

#endif  // GENRBF_DATASET_HPP_
