/*!
 *  Copyright (c) 2026 by Contributors
 * \file simd/kernels_scalar.cc
 * \brief Reference kernels. Plain loops, sequential reduction order.
 */
#include "fsgcn/simd/kernels.h"

namespace fsgcn::simd {

namespace {

void axpy(size_t n, double a, const double* x, double* y) {
  for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot(size_t n, const double* x, const double* y) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double squared_distance(size_t n, const double* x, const double* y) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

void relu(size_t n, const double* x, double* y) {
  for (size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(size_t n, const double* upstream, const double* activation, double* out) {
  for (size_t i = 0; i < n; ++i) out[i] = activation[i] > 0.0 ? upstream[i] : 0.0;
}

void masked_scale(size_t n, double scale, const double* x, const double* mask, double* out) {
  for (size_t i = 0; i < n; ++i) out[i] = scale * x[i] * mask[i];
}

void update_moments(size_t n, double b1, double b2, const double* g, double* m, double* v) {
  for (size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::kScalar, "scalar", axpy, dot, squared_distance, relu,
                                 relu_backward, masked_scale, update_moments};
  return table;
}

}  // namespace fsgcn::simd
