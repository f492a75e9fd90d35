#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "qlbits/error.hpp"

namespace qlbits {

/// Dense row-major matrix. Sizes in this project are desk scale (a few
/// hundred rows), so everything is stored contiguously and copied by value.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  const T& operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const T> data() const { return data_; }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Copy `block` into this matrix with its top-left corner at (r0, c0).
  void set_block(std::size_t r0, std::size_t c0, const Matrix& block) {
    if (r0 + block.rows() > rows_ || c0 + block.cols() > cols_)
      throw ContractViolation("set_block: block does not fit");
    for (std::size_t i = 0; i < block.rows(); ++i)
      std::copy(block.row(i).begin(), block.row(i).end(), row(r0 + i).begin() + c0);
  }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const {
    Matrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) out(i, j) = (*this)(r0 + i, c0 + j);
    return out;
  }

  std::vector<T> row_sums() const {
    std::vector<T> s(rows_, T{});
    for (std::size_t i = 0; i < rows_; ++i)
      for (T v : row(i)) s[i] += v;
    return s;
  }

  std::vector<T> col_sums() const {
    std::vector<T> s(cols_, T{});
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) s[j] += (*this)(i, j);
    return s;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using Mat = Matrix<double>;
using Vec = std::vector<double>;

inline Vec matvec(const Mat& m, std::span<const double> x) {
  if (m.cols() != x.size()) throw ContractViolation("matvec: dimension mismatch");
  Vec y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    y[i] = std::inner_product(r.begin(), r.end(), x.begin(), 0.0);
  }
  return y;
}

/// Row vector times matrix: returns x^T M.
inline Vec vecmat(std::span<const double> x, const Mat& m) {
  if (m.rows() != x.size()) throw ContractViolation("vecmat: dimension mismatch");
  Vec y(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (x[i] == 0.0) continue;
    auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) y[j] += x[i] * r[j];
  }
  return y;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline void normalize(Vec& v) {
  const double n = norm2(v);
  if (n == 0.0) throw ContractViolation("normalize: zero vector");
  for (double& x : v) x /= n;
}

inline double frobenius(const Mat& m) { return norm2(m.data()); }

inline double trace(const Mat& m) {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) t += m(i, i);
  return t;
}

inline bool is_symmetric(const Mat& m, double tol = 1e-12) {
  if (!m.square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol) return false;
  return true;
}

/// ||M x - lambda x||_2
inline double eigen_residual(const Mat& m, std::span<const double> x, double lambda) {
  Vec y = matvec(m, x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= lambda * x[i];
  return norm2(y);
}

}  // namespace qlbits
