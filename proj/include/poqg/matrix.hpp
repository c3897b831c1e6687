#ifndef POQG_MATRIX_HPP
#define POQG_MATRIX_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "poqg/errors.hpp"

namespace poqg {

// Dense row-major matrix of doubles. Rows are observations, columns are
// features. Small by intent: the toolkit only ever needs row access and
// Euclidean distances.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    // Appends one row. The first appended row fixes the width of an empty
    // matrix; later rows must match it.
    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) {
            cols_ = values.size();
        }
        if (values.size() != cols_) {
            throw InternalError("append_row: expected " + std::to_string(cols_) +
                                " values, got " + std::to_string(values.size()));
        }
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

} // namespace poqg

#endif
