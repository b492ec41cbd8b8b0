#pragma once

/// \file dense.hpp
/// Small row-major dense matrices for the per-entity blocks.
///
/// The mat-vec kernels use a fixed summation order so that every caller
/// obtains bitwise identical results regardless of threading.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace hpmg {

class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Matrix transposed() const;
  Matrix& operator+=(const Matrix& other);
  Matrix& operator*=(double s);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);

/// y = A x
void gemv(const Matrix& a, std::span<const double> x, std::span<double> y);
/// y += alpha * A x
void gemv_add(const Matrix& a, std::span<const double> x, std::span<double> y, double alpha = 1.0);

/// Inverse via LU with partial pivoting. Throws AssemblyError if singular.
Matrix invert(const Matrix& a);

/// Largest absolute entry.
double max_abs(const Matrix& a);
/// max |a - b| / max|b| (absolute when b == 0)
double relative_difference(const Matrix& a, const Matrix& b);

/// Row-major CSV dump, 17 significant digits.
void write_csv(std::ostream& os, const Matrix& a);

} // namespace hpmg
