/*!
 *  Copyright (c) 2026 by Contributors
 * \file simd/kernels_neon.cc
 * \brief AArch64 NEON kernels, 2 doubles per lane.
 */
#include "fsgcn/simd/kernels.h"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace fsgcn::simd {

namespace {

void axpy(size_t n, double a, const double* x, double* y) {
  const float64x2_t va = vdupq_n_f64(a);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

double dot(size_t n, const double* x, const double* y) {
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  double out = vaddvq_f64(acc);
  for (; i < n; ++i) out += x[i] * y[i];
  return out;
}

double squared_distance(size_t n, const double* x, const double* y) {
  float64x2_t acc = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double out = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    out += d * d;
  }
  return out;
}

void relu(size_t n, const double* x, double* y) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    vst1q_f64(y + i, vbslq_f64(vcgtq_f64(v, zero), v, zero));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(size_t n, const double* upstream, const double* activation, double* out) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vbslq_f64(vcgtq_f64(vld1q_f64(activation + i), zero), vld1q_f64(upstream + i), zero));
  for (; i < n; ++i) out[i] = activation[i] > 0.0 ? upstream[i] : 0.0;
}

void masked_scale(size_t n, double scale, const double* x, const double* mask, double* out) {
  const float64x2_t s = vdupq_n_f64(scale);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vmulq_f64(s, vld1q_f64(x + i)), vld1q_f64(mask + i)));
  for (; i < n; ++i) out[i] = scale * x[i] * mask[i];
}

void update_moments(size_t n, double b1, double b2, const double* g, double* m, double* v) {
  const float64x2_t vb1 = vdupq_n_f64(b1), vc1 = vdupq_n_f64(1.0 - b1);
  const float64x2_t vb2 = vdupq_n_f64(b2), vc2 = vdupq_n_f64(1.0 - b2);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t gi = vld1q_f64(g + i);
    vst1q_f64(m + i, vfmaq_f64(vmulq_f64(vc1, gi), vb1, vld1q_f64(m + i)));
    vst1q_f64(v + i, vfmaq_f64(vmulq_f64(vmulq_f64(vc2, gi), gi), vb2, vld1q_f64(v + i)));
  }
  for (; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
  }
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{Isa::kNeon, "neon", axpy, dot, squared_distance, relu,
                                 relu_backward, masked_scale, update_moments};
  return table;
}

}  // namespace fsgcn::simd

#endif
