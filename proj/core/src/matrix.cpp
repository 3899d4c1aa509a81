#include "lpsum/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>

namespace lpsum {

MatrixF::MatrixF(Index rows, Index cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw std::invalid_argument("MatrixF: buffer length " +
                                    std::to_string(data_.size()) + " != " +
                                    std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    check_finite("MatrixF construction");
}

MatrixF::MatrixF(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw std::invalid_argument("MatrixF: ragged initializer rows");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
    check_finite("MatrixF construction");
}

MatrixF MatrixF::identity(Index n) {
    MatrixF m(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

MatrixF MatrixF::row_block(Index first, Index count) const {
    if (first + count > rows_) {
        throw std::out_of_range("MatrixF::row_block beyond last row");
    }
    MatrixF out(count, cols_);
    std::copy(data_.begin() + first * cols_, data_.begin() + (first + count) * cols_,
              out.data_.begin());
    return out;
}

MatrixF MatrixF::select_rows(std::span<const Index> idx) const {
    MatrixF out(idx.size(), cols_);
    for (Index k = 0; k < idx.size(); ++k) {
        if (idx[k] >= rows_) throw std::out_of_range("MatrixF::select_rows index");
        std::copy(row(idx[k]).begin(), row(idx[k]).end(), out.row(k).begin());
    }
    return out;
}

MatrixF MatrixF::select_cols(std::span<const Index> idx) const {
    MatrixF out(rows_, idx.size());
    for (Index i = 0; i < rows_; ++i) {
        for (Index k = 0; k < idx.size(); ++k) {
            if (idx[k] >= cols_) throw std::out_of_range("MatrixF::select_cols index");
            out(i, k) = (*this)(i, idx[k]);
        }
    }
    return out;
}

void MatrixF::append_rows(const MatrixF& other) {
    if (other.empty() && other.rows_ == 0) return;
    if (empty() && rows_ == 0) {
        *this = other;
        return;
    }
    if (other.cols_ != cols_) {
        throw std::invalid_argument("MatrixF::append_rows column mismatch");
    }
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    rows_ += other.rows_;
}

void MatrixF::append_row(std::span<const double> r) {
    if (rows_ == 0 && cols_ == 0) cols_ = r.size();
    if (r.size() != cols_) {
        throw std::invalid_argument("MatrixF::append_row width mismatch");
    }
    for (double v : r) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("MatrixF::append_row non-finite entry");
        }
    }
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
}

MatrixF MatrixF::transposed() const {
    MatrixF out(cols_, rows_);
    for (Index i = 0; i < rows_; ++i)
        for (Index j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

void MatrixF::check_finite(const std::string& context) const {
    for (Index i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw std::invalid_argument(context + ": non-finite entry at flat index " +
                                        std::to_string(i));
        }
    }
}

MatrixF matmul(const MatrixF& a, const MatrixF& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul: inner dimensions disagree");
    }
    MatrixF c(a.rows(), b.cols());
    for (MatrixF::Index i = 0; i < a.rows(); ++i) {
        for (MatrixF::Index k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (MatrixF::Index j = 0; j < b.cols(); ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

std::vector<double> matvec(const MatrixF& a, std::span<const double> x) {
    if (x.size() != a.cols()) {
        throw std::invalid_argument("matvec: dimension mismatch");
    }
    std::vector<double> y(a.rows(), 0.0);
    for (MatrixF::Index i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        auto r = a.row(i);
        for (MatrixF::Index j = 0; j < x.size(); ++j) acc += r[j] * x[j];
        y[i] = acc;
    }
    return y;
}

double max_abs_diff(const MatrixF& a, const MatrixF& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    }
    double m = 0.0;
    for (MatrixF::Index i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    }
    return m;
}

}  // namespace lpsum
