#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace hodge {

using Index = std::int64_t;
using VertexId = std::int32_t;

/// A simplex as a strictly ascending list of vertex ids. The ascending order fixes the orientation.
using Simplex = std::vector<VertexId>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using SparseMatrixXd = Eigen::SparseMatrix<double>;

}  // namespace hodge
