#pragma once

#include <Eigen/Dense>

#include "lpsum/matrix.hpp"

namespace lpsum::detail {

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::MatrixXd to_eigen(const MatrixF& m) {
    return Eigen::Map<const EigenRowMajor>(m.data(), static_cast<Eigen::Index>(m.rows()),
                                           static_cast<Eigen::Index>(m.cols()));
}

inline MatrixF from_eigen(const Eigen::MatrixXd& e) {
    MatrixF m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
    Eigen::Map<EigenRowMajor>(m.data(), e.rows(), e.cols()) = e;
    return m;
}

}  // namespace lpsum::detail
