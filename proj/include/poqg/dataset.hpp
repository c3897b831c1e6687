#ifndef POQG_DATASET_HPP
#define POQG_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "poqg/matrix.hpp"

namespace poqg {

// Binary classification dataset. Labels are 0 (majority) and 1 (minority);
// loaders are responsible for the mapping. Features are finite doubles.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return features.cols(); }

    std::vector<std::size_t> rows_of(int label) const;
    std::size_t count_of(int label) const;
    Dataset subset(const std::vector<std::size_t>& rows) const;
};

// Throws DataError unless the dataset is structurally sound: shapes agree,
// labels are 0/1, every feature value is finite.
void validate(const Dataset& d);

struct DatasetStats {
    std::size_t n_rows = 0;
    std::size_t n_features = 0;
    std::size_t n_majority = 0;
    std::size_t n_minority = 0;
    double imbalance_ratio = 0.0;
};

DatasetStats stats(const Dataset& d);

// Fold assignment for stratified cross-validation: assignments[i] is the
// fold of row i, in [0, n_folds).
struct FoldPlan {
    std::size_t n_folds = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> assignments;

    std::vector<std::size_t> test_rows(std::size_t fold) const;
    std::vector<std::size_t> train_rows(std::size_t fold) const;
};

// Stratified assignment: rows of each class are shuffled (seeded) and dealt
// round-robin, so per-fold class counts differ by at most one.
FoldPlan stratified_folds(const Dataset& d, std::size_t n_folds, std::uint64_t seed);

// KEEL/ARFF-style file: @relation, @attribute, optional @inputs/@outputs,
// @data, '%' comments. The last attribute is the class; the rarer class
// value maps to label 1 (ties: lexicographically smaller value). All
// non-class attributes must be numeric.
Dataset load_keel(const std::filesystem::path& path);

// CSV with header row. label_column is a 0-based index (if the string is all
// digits) or a header name. Rows whose label equals minority_label get label
// 1; exactly one other label value may appear and becomes 0.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column,
                 const std::string& minority_label);

// Writes features + "class" column; with synthetic_flags (one per row), adds
// a trailing 0/1 "synthetic" column. Doubles are shortest-round-trip, so a
// save/load cycle reproduces values exactly.
void save_csv(const Dataset& d, const std::filesystem::path& path,
              const std::vector<int>* synthetic_flags = nullptr);

// Per-feature min-max scaling to [0, 1]. Constant features map to 0.
Dataset minmax_scale(const Dataset& d);

// Built-in two-dimensional demo dataset: 202 majority and 23 minority points
// from overlapping Gaussian clusters.
Dataset make_case_study(std::uint64_t seed);

// Shortest-round-trip decimal form of a double (to_chars), used everywhere a
// double is written into an artifact.
std::string format_double(double v);

} // namespace poqg

#endif
