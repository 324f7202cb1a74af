#include "genrbf/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "genrbf/error.hpp"

namespace genrbf {

double Dataset::missing_fraction() const {
    if (points.empty() || dim() == 0) return 0.0;
    std::size_t miss = 0;
    for (const auto& p : points) miss += p.missing.size();
    return static_cast<double>(miss) / (static_cast<double>(points.size()) * dim());
}

void Dataset::validate() const {
    if (points.empty()) throw Error("dataset is empty");
    if (points.size() != labels.size())
        throw Error("points/labels length mismatch");
    const int n = dim();
    if (!feature_names.empty() && static_cast<int>(feature_names.size()) != n)
        throw Error("feature_names length mismatch");
    for (std::size_t r = 0; r < points.size(); ++r) {
        const auto& p = points[r];
        if (p.dim() != n) throw ParseError("inconsistent dimension", r);
        if (labels[r] != -1 && labels[r] != 1) throw ParseError("label not in {-1,+1}", r);
        if (!std::is_sorted(p.missing.begin(), p.missing.end()))
            throw ParseError("missing index set not sorted", r);
        for (int j : p.missing)
            if (j < 0 || j >= n) throw ParseError("missing index out of range", r);
        for (int j = 0; j < n; ++j)
            if (!p.is_missing(j) && !std::isfinite(p.values[j]))
                throw ParseError("non-finite observed entry", r);
    }
}

Dataset Dataset::subset(const std::vector<int>& row_indices) const {
    Dataset out;
    out.feature_names = feature_names;
    out.points.reserve(row_indices.size());
    out.labels.reserve(row_indices.size());
    for (int r : row_indices) {
        out.points.push_back(points.at(r));
        out.labels.push_back(labels.at(r));
    }
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [ptr, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && ptr == e;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::set<std::string>& missing_tokens,
                 const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split_line(line));
    }
    if (rows.empty()) throw Error("empty file: " + path);

    const std::size_t ncols = rows[0].size();
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != ncols)
            throw ParseError("expected " + std::to_string(ncols) + " columns, got " +
                                 std::to_string(rows[r].size()),
                             r);
    if (ncols < 2) throw Error("need at least one feature column plus the label column");

    // Header detection: a non-numeric, non-missing cell in the first row
    // marks a header -- unless its whole column is non-numeric (a string
    // label column), which must not be mistaken for one.
    bool has_header = false;
    for (std::size_t c = 0; c < ncols; ++c) {
        double v;
        std::string t = trim(rows[0][c]);
        if (parse_double(t, v) || missing_tokens.count(t)) continue;
        bool column_numeric = false;
        for (std::size_t r = 1; r < rows.size() && !column_numeric; ++r)
            column_numeric = parse_double(trim(rows[r][c]), v);
        if (column_numeric || rows.size() == 1) {
            has_header = true;
            break;
        }
    }

    int label_idx = -1;
    std::vector<std::string> header;
    if (has_header) header = rows[0];
    {
        double idx_val;
        if (parse_double(label_column, idx_val)) {
            label_idx = static_cast<int>(idx_val);
            if (label_idx < 0) label_idx += static_cast<int>(ncols);
        } else {
            if (!has_header)
                throw Error("label column named '" + label_column + "' but file has no header");
            for (std::size_t c = 0; c < ncols; ++c)
                if (trim(header[c]) == label_column) label_idx = static_cast<int>(c);
            if (label_idx < 0) throw Error("label column '" + label_column + "' not found");
        }
    }
    if (label_idx < 0 || label_idx >= static_cast<int>(ncols))
        throw Error("label column index out of range");

    Dataset data;
    if (has_header) {
        for (std::size_t c = 0; c < ncols; ++c)
            if (static_cast<int>(c) != label_idx) data.feature_names.push_back(trim(header[c]));
    }

    const int nfeat = static_cast<int>(ncols) - 1;
    std::vector<std::string> raw_labels;
    std::map<std::string, int> label_values;
    for (std::size_t r = has_header ? 1 : 0; r < rows.size(); ++r) {
        IncompletePoint p;
        p.values = Eigen::VectorXd::Zero(nfeat);
        int f = 0;
        for (std::size_t c = 0; c < ncols; ++c) {
            std::string cell = trim(rows[r][c]);
            if (static_cast<int>(c) == label_idx) {
                raw_labels.push_back(cell);
                continue;
            }
            if (missing_tokens.count(cell)) {
                p.missing.push_back(f);
            } else {
                double v;
                if (!parse_double(cell, v) || !std::isfinite(v))
                    throw ParseError("cannot parse cell '" + cell + "'", r);
                p.values[f] = v;
            }
            ++f;
        }
        label_values[raw_labels.back()] = 0;
        if (label_values.size() > 2)
            throw ParseError("more than two distinct label values", r);
        data.points.push_back(std::move(p));
    }
    if (label_values.size() != 2) throw Error("label column must hold exactly two distinct values");

    // Map the two raw values, sorted ascending, to -1 / +1.
    auto it = label_values.begin();
    it->second = -1;
    std::next(it)->second = +1;
    for (const auto& s : raw_labels) data.labels.push_back(label_values.at(s));
    data.validate();
    return data;
}

Dataset load_csv(const std::string& path) {
    return load_csv(path, {"NA", "?", ""}, "-1");
}

void save_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open file for writing: " + path);
    out.precision(17);
    if (!data.feature_names.empty()) {
        for (const auto& name : data.feature_names) out << name << ',';
        out << "label\n";
    }
    for (int r = 0; r < data.size(); ++r) {
        const auto& p = data.points[r];
        for (int j = 0; j < p.dim(); ++j) {
            if (p.is_missing(j))
                out << "NA";
            else
                out << p.values[j];
            out << ',';
        }
        out << data.labels[r] << '\n';
    }
}

StandardizationParams fit_standardization(const Dataset& data) {
    data.validate();
    const int n = data.dim();
    StandardizationParams params;
    params.mean = Eigen::VectorXd::Zero(n);
    params.stddev = Eigen::VectorXd::Ones(n);
    for (int j = 0; j < n; ++j) {
        double sum = 0.0, sumsq = 0.0;
        long count = 0;
        for (const auto& p : data.points) {
            if (p.is_missing(j)) continue;
            sum += p.values[j];
            sumsq += p.values[j] * p.values[j];
            ++count;
        }
        if (count == 0) {
            std::string name = data.feature_names.empty() ? ("#" + std::to_string(j))
                                                          : data.feature_names[j];
            throw Error("feature " + name + " has no observed values");
        }
        double mean = sum / count;
        double var = sumsq / count - mean * mean;
        params.mean[j] = mean;
        params.stddev[j] = std::max(std::sqrt(std::max(var, 0.0)), StandardizationParams::kSdFloor);
    }
    return params;
}

Dataset apply_standardization(const Dataset& data, const StandardizationParams& params) {
    if (data.dim() != params.mean.size())
        throw Error("standardization dimension mismatch");
    Dataset out = data;
    for (auto& p : out.points)
        for (int j = 0; j < p.dim(); ++j)
            if (!p.is_missing(j))
                p.values[j] = (p.values[j] - params.mean[j]) / params.stddev[j];
    return out;
}

Dataset invert_standardization(const Dataset& data, const StandardizationParams& params) {
    if (data.dim() != params.mean.size())
        throw Error("standardization dimension mismatch");
    Dataset out = data;
    for (auto& p : out.points)
        for (int j = 0; j < p.dim(); ++j)
            if (!p.is_missing(j))
                p.values[j] = p.values[j] * params.stddev[j] + params.mean[j];
    return out;
}

}  // namespace genrbf
