#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpsum {

/// Dense row-major matrix of doubles. The universal carrier for data blocks,
/// bases, change-of-basis factors, and summaries.
///
/// Entries are validated to be finite: NaN/Inf are rejected at construction
/// (and by every mutating entry point that admits external data), because
/// score thresholds downstream are meaningless under non-finite values.
class MatrixF {
public:
    using Index = std::size_t;

    MatrixF() : rows_(0), cols_(0) {}

    /// rows x cols zero matrix.
    MatrixF(Index rows, Index cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    /// Construct from a flat row-major buffer. Throws if the buffer length
    /// does not equal rows*cols or any entry is non-finite.
    MatrixF(Index rows, Index cols, std::vector<double> data);

    /// Construct from nested initializer lists; rows must have equal length.
    MatrixF(std::initializer_list<std::initializer_list<double>> rows);

    static MatrixF identity(Index n);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    Index size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(Index i, Index j) noexcept { return data_[i * cols_ + j]; }
    double operator()(Index i, Index j) const noexcept { return data_[i * cols_ + j]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    std::span<const double> row(Index i) const {
        return std::span<const double>(data_.data() + i * cols_, cols_);
    }
    std::span<double> row(Index i) {
        return std::span<double>(data_.data() + i * cols_, cols_);
    }

    /// Copy of rows [first, first+count) as a new matrix.
    MatrixF row_block(Index first, Index count) const;

    /// Copy of the rows named by `idx`, in the given order.
    MatrixF select_rows(std::span<const Index> idx) const;

    /// Copy of the columns named by `idx`, in the given order.
    MatrixF select_cols(std::span<const Index> idx) const;

    /// Append the rows of `other` below this matrix (column counts must agree;
    /// appending to an empty matrix adopts the column count).
    void append_rows(const MatrixF& other);
    void append_row(std::span<const double> r);

    MatrixF transposed() const;

    /// Throws std::invalid_argument if any entry is NaN or Inf.
    void check_finite(const std::string& context) const;

    friend bool operator==(const MatrixF& a, const MatrixF& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    Index rows_;
    Index cols_;
    std::vector<double> data_;
};

/// C = A * B (naive dense product; instances here are tall-thin or tiny).
MatrixF matmul(const MatrixF& a, const MatrixF& b);

/// y = A * x.
std::vector<double> matvec(const MatrixF& a, std::span<const double> x);

/// Largest absolute entry difference; matrices must share a shape.
double max_abs_diff(const MatrixF& a, const MatrixF& b);

}  // namespace lpsum
