#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace boxheat {

using cplx = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using SparseMatrixC = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace boxheat
