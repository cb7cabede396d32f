#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "detnet/check.hpp"
#include "detnet/kernels.hpp"

namespace detnet {

// Dense row-major double matrix. Column vectors are d x 1, row vectors 1 x n.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols, 0.0) {
    assert(rows >= 0 && cols >= 0);
  }
  Mat(int rows, int cols, std::vector<double> values)
      : rows_(rows), cols_(cols), data_(std::move(values)) {
    assert(data_.size() == size_t(rows) * cols);
  }

  static Mat zeros(int rows, int cols) { return Mat(rows, cols); }
  static Mat constant(int rows, int cols, double v) {
    Mat m(rows, cols);
    m.fill(v);
    return m;
  }
  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  // 1 x n row vector / n x 1 column vector from values.
  static Mat row(std::vector<double> v) {
    const int n = int(v.size());
    return Mat(1, n, std::move(v));
  }
  static Mat col(std::vector<double> v) {
    const int n = int(v.size());
    return Mat(n, 1, std::move(v));
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int r, int c) { return data_[size_t(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[size_t(r) * cols_ + c]; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row_ptr(int r) { return data_.data() + size_t(r) * cols_; }
  const double* row_ptr(int r) const { return data_.data() + size_t(r) * cols_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  bool same_shape(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  Mat transposed() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Mat col_slice(int c0, int count) const {
    Mat out(rows_, count);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < count; ++j) out(i, j) = (*this)(i, c0 + j);
    return out;
  }

  std::vector<double> column(int c) const {
    std::vector<double> v(rows_);
    for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
    return v;
  }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// C = A * B and transposed forms, dispatched to the active kernel set.
inline Mat matmul(const Mat& a, const Mat& b) {
  DETNET_CHECK(a.cols() == b.rows(), "matmul shape");
  Mat c(a.rows(), b.cols());
  kernels::active().gemm_nn(a.rows(), b.cols(), a.cols(), a.data(), b.data(),
                            c.data(), false);
  return c;
}
inline Mat matmul_tn(const Mat& a, const Mat& b) {  // A^T * B
  DETNET_CHECK(a.rows() == b.rows(), "matmul_tn shape");
  Mat c(a.cols(), b.cols());
  kernels::active().gemm_tn(a.cols(), b.cols(), a.rows(), a.data(), b.data(),
                            c.data(), false);
  return c;
}
inline Mat matmul_nt(const Mat& a, const Mat& b) {  // A * B^T
  DETNET_CHECK(a.cols() == b.cols(), "matmul_nt shape");
  Mat c(a.rows(), b.rows());
  kernels::active().gemm_nt(a.rows(), b.rows(), a.cols(), a.data(), b.data(),
                            c.data(), false);
  return c;
}

}  // namespace detnet
