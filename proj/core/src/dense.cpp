#include "hpmg/dense.hpp"

#include "hpmg/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace hpmg {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  assert(rows_ == other.rows_ && cols_ == other.cols_);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  assert(a.cols() == b.rows());
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }

Matrix operator-(Matrix a, const Matrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) -= b(i, j);
  return a;
}

Matrix operator*(double s, Matrix a) { return a *= s; }

void gemv(const Matrix& a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == a.cols() && y.size() == a.rows());
  const std::size_t n = a.cols();
  const double* row = a.data();
  for (std::size_t i = 0; i < a.rows(); ++i, row += n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

void gemv_add(const Matrix& a, std::span<const double> x, std::span<double> y, double alpha) {
  assert(x.size() == a.cols() && y.size() == a.rows());
  const std::size_t n = a.cols();
  const double* row = a.data();
  for (std::size_t i = 0; i < a.rows(); ++i, row += n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * x[j];
    y[i] += alpha * s;
  }
}

Matrix invert(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("invert: matrix is not square");
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> map(a.data(), n, n);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(map);
  // PartialPivLU does not report singularity; inspect the pivots instead.
  const auto& lu_mat = lu.matrixLU();
  const double scale = std::max(1.0, map.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double piv = std::abs(lu_mat(i, i));
    if (!(piv > 1e-13 * scale)) throw AssemblyError("invert: matrix is singular to working precision");
  }
  Eigen::MatrixXd inv = lu.inverse();
  Matrix out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = inv(i, j);
  return out;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (double v : a.row(i)) m = std::max(m, std::abs(v));
  return m;
}

double relative_difference(const Matrix& a, const Matrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  const double scale = max_abs(b);
  return scale > 0.0 ? d / scale : d;
}

void write_csv(std::ostream& os, const Matrix& a) {
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) os << ',';
      os << a(i, j);
    }
    os << '\n';
  }
  os.precision(old);
}

} // namespace hpmg
