/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/dense.h
 * \brief Row-major dense matrix and trainable parameter.
 */
#ifndef FSGCN_DENSE_H_
#define FSGCN_DENSE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fsgcn {

struct DenseMatrix {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(int64_t r, int64_t c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r * c), fill) {}

  double& operator()(int64_t r, int64_t c) { return data[static_cast<size_t>(r * cols + c)]; }
  double operator()(int64_t r, int64_t c) const { return data[static_cast<size_t>(r * cols + c)]; }

  std::span<double> row(int64_t r) { return {data.data() + r * cols, static_cast<size_t>(cols)}; }
  std::span<const double> row(int64_t r) const {
    return {data.data() + r * cols, static_cast<size_t>(cols)};
  }

  size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }
  void fill(double v) { std::fill(data.begin(), data.end(), v); }
  bool all_finite() const {
    return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
  }

  static DenseMatrix identity(int64_t n) {
    DenseMatrix m(n, n);
    for (int64_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  bool operator==(const DenseMatrix&) const = default;
};

/// Gradients accumulate into `grad`; the optimizer zeroes them each step.
struct Parameter {
  std::string name;
  DenseMatrix value;
  DenseMatrix grad;

  Parameter() = default;
  Parameter(std::string n, int64_t rows, int64_t cols)
      : name(std::move(n)), value(rows, cols), grad(rows, cols) {}

  void zero_grad() { grad.fill(0.0); }
  bool is_matrix() const { return value.rows > 1 && value.cols > 1; }
};

}  // namespace fsgcn

#endif  // FSGCN_DENSE_H_
