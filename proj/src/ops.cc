/*!
 *  Copyright (c) 2026 by Contributors
 * \file ops.cc
 */
#include "fsgcn/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fsgcn/simd/kernels.h"

namespace fsgcn {

namespace {

std::string shape(const DenseMatrix& m) {
  return "(" + std::to_string(m.rows) + "x" + std::to_string(m.cols) + ")";
}

}  // namespace

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x) {
  if (a.cols != x.rows)
    throw ShapeError("spmm: A has " + std::to_string(a.cols) + " columns, X is " + shape(x));
  const auto& k = simd::kernels();
  DenseMatrix y(a.rows, x.cols);
  const auto width = static_cast<size_t>(x.cols);
  for (int64_t i = 0; i < a.rows; ++i) {
    double* out = y.row(i).data();
    for (int64_t e = a.offsets[i]; e < a.offsets[i + 1]; ++e)
      k.axpy(width, a.values[e], x.row(a.indices[e]).data(), out);
  }
  return y;
}

DenseMatrix spmm_transposed(const SparseMatrix& a, const DenseMatrix& upstream) {
  if (a.rows != upstream.rows)
    throw ShapeError("spmm_transposed: A has " + std::to_string(a.rows) + " rows, upstream is " +
                     shape(upstream));
  const auto& k = simd::kernels();
  DenseMatrix y(a.cols, upstream.cols);
  const auto width = static_cast<size_t>(upstream.cols);
  for (int64_t i = 0; i < a.rows; ++i) {
    const double* in = upstream.row(i).data();
    for (int64_t e = a.offsets[i]; e < a.offsets[i + 1]; ++e)
      k.axpy(width, a.values[e], in, y.row(a.indices[e]).data());
  }
  return y;
}

DenseMatrix spmm_backward(const SparseMatrix& a, const DenseMatrix& upstream, bool symmetric) {
  return symmetric ? spmm(a, upstream) : spmm_transposed(a, upstream);
}

DenseMatrix affine(const DenseMatrix& x, const DenseMatrix& w) {
  if (x.cols != w.rows) throw ShapeError("affine: X " + shape(x) + " incompatible with W " + shape(w));
  const auto& k = simd::kernels();
  DenseMatrix y(x.rows, w.cols);
  const auto width = static_cast<size_t>(w.cols);
  for (int64_t i = 0; i < x.rows; ++i) {
    double* out = y.row(i).data();
    for (int64_t j = 0; j < x.cols; ++j) {
      const double xij = x(i, j);
      if (xij != 0.0) k.axpy(width, xij, w.row(j).data(), out);
    }
  }
  return y;
}

void affine_backward(const DenseMatrix& x, const DenseMatrix& w, const DenseMatrix& upstream,
                     DenseMatrix* grad_w, DenseMatrix* grad_x) {
  if (upstream.rows != x.rows || upstream.cols != w.cols || x.cols != w.rows)
    throw ShapeError("affine_backward: X " + shape(x) + ", W " + shape(w) + ", upstream " + shape(upstream));
  const auto& k = simd::kernels();
  if (grad_w) {
    if (!grad_w->same_shape(w)) throw ShapeError("affine_backward: grad_W shape " + shape(*grad_w));
    const auto width = static_cast<size_t>(w.cols);
    for (int64_t i = 0; i < x.rows; ++i) {
      const double* up = upstream.row(i).data();
      for (int64_t j = 0; j < x.cols; ++j) {
        const double xij = x(i, j);
        if (xij != 0.0) k.axpy(width, xij, up, grad_w->row(j).data());
      }
    }
  }
  if (grad_x) {
    *grad_x = DenseMatrix(x.rows, x.cols);
    const auto width = static_cast<size_t>(w.cols);
    for (int64_t i = 0; i < x.rows; ++i) {
      const double* up = upstream.row(i).data();
      for (int64_t j = 0; j < x.cols; ++j) (*grad_x)(i, j) = k.dot(width, up, w.row(j).data());
    }
  }
}

void add_row_bias(DenseMatrix* y, const DenseMatrix& bias) {
  if (bias.rows != 1 || bias.cols != y->cols)
    throw ShapeError("add_row_bias: bias " + shape(bias) + " vs output " + shape(*y));
  const auto& k = simd::kernels();
  for (int64_t i = 0; i < y->rows; ++i) k.axpy(static_cast<size_t>(y->cols), 1.0, bias.data.data(), y->row(i).data());
}

void row_bias_backward(const DenseMatrix& upstream, DenseMatrix* grad_b) {
  if (grad_b->rows != 1 || grad_b->cols != upstream.cols)
    throw ShapeError("row_bias_backward: grad " + shape(*grad_b) + " vs upstream " + shape(upstream));
  const auto& k = simd::kernels();
  for (int64_t i = 0; i < upstream.rows; ++i)
    k.axpy(static_cast<size_t>(upstream.cols), 1.0, upstream.row(i).data(), grad_b->data.data());
}

DenseMatrix relu(const DenseMatrix& x) {
  DenseMatrix y(x.rows, x.cols);
  simd::kernels().relu(x.size(), x.data.data(), y.data.data());
  return y;
}

DenseMatrix relu_backward(const DenseMatrix& upstream, const DenseMatrix& activation) {
  if (!upstream.same_shape(activation))
    throw ShapeError("relu_backward: upstream " + shape(upstream) + " vs activation " + shape(activation));
  DenseMatrix g(upstream.rows, upstream.cols);
  simd::kernels().relu_backward(g.size(), upstream.data.data(), activation.data.data(), g.data.data());
  return g;
}

DropoutMask make_dropout_mask(int64_t rows, int64_t cols, double keep_prob, Rng& rng) {
  if (!(keep_prob > 0.0) || keep_prob > 1.0)
    throw std::invalid_argument("make_dropout_mask: keep probability must lie in (0, 1]");
  DropoutMask m{DenseMatrix(rows, cols), keep_prob};
  for (double& v : m.mask.data) v = rng.bernoulli(keep_prob) ? 1.0 : 0.0;
  return m;
}

DenseMatrix apply_dropout(const DenseMatrix& x, const DropoutMask& mask) {
  if (!x.same_shape(mask.mask)) throw ShapeError("apply_dropout: X " + shape(x) + " vs mask " + shape(mask.mask));
  DenseMatrix y(x.rows, x.cols);
  simd::kernels().masked_scale(x.size(), 1.0 / mask.keep_prob, x.data.data(), mask.mask.data.data(), y.data.data());
  return y;
}

DenseMatrix dropout_backward(const DenseMatrix& upstream, const DropoutMask& mask) {
  return apply_dropout(upstream, mask);
}

void softmax_row(std::span<const double> logits, std::span<double> probs) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (size_t j = 0; j < logits.size(); ++j) {
    probs[j] = std::exp(logits[j] - mx);
    total += probs[j];
  }
  for (double& p : probs) p /= total;
}

DenseMatrix softmax(const DenseMatrix& logits) {
  DenseMatrix p(logits.rows, logits.cols);
  for (int64_t i = 0; i < logits.rows; ++i) softmax_row(logits.row(i), p.row(i));
  return p;
}

double cross_entropy_row(std::span<const double> logits, int target) {
  if (target < 0 || static_cast<size_t>(target) >= logits.size())
    throw std::out_of_range("cross_entropy: target " + std::to_string(target) + " outside [0, " +
                            std::to_string(logits.size()) + ")");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double v : logits) total += std::exp(v - mx);
  return std::log(total) - (logits[target] - mx);
}

double softmax_cross_entropy(const DenseMatrix& logits, std::span<const int64_t> rows,
                             std::span<const int> targets, std::span<const double> weights,
                             DenseMatrix* grad_logits) {
  if (rows.size() != targets.size() || rows.size() != weights.size())
    throw ShapeError("softmax_cross_entropy: rows/targets/weights length mismatch");
  if (grad_logits && !grad_logits->same_shape(logits))
    throw ShapeError("softmax_cross_entropy: gradient shape " + shape(*grad_logits));
  std::vector<double> probs(static_cast<size_t>(logits.cols));
  double loss = 0.0;
  for (size_t k = 0; k < rows.size(); ++k) {
    const int64_t r = rows[k];
    if (r < 0 || r >= logits.rows) throw std::out_of_range("softmax_cross_entropy: row out of range");
    const auto row = logits.row(r);
    loss += weights[k] * cross_entropy_row(row, targets[k]);
    if (grad_logits) {
      softmax_row(row, probs);
      probs[targets[k]] -= 1.0;
      simd::kernels().axpy(probs.size(), weights[k], probs.data(), grad_logits->row(r).data());
    }
  }
  return loss;
}

double squared_euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("distance: length mismatch");
  return simd::kernels().squared_distance(a.size(), a.data(), b.data());
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_euclidean_distance(a, b));
}

void euclidean_distance_backward(std::span<const double> a, std::span<const double> b, double upstream,
                                 std::span<double> grad_a, std::span<double> grad_b) {
  const double d = euclidean_distance(a, b);
  if (d == 0.0) return;
  const double s = upstream / d;
  for (size_t k = 0; k < a.size(); ++k) {
    const double g = s * (a[k] - b[k]);
    grad_a[k] += g;
    grad_b[k] -= g;
  }
}

void squared_euclidean_distance_backward(std::span<const double> a, std::span<const double> b,
                                         double upstream, std::span<double> grad_a,
                                         std::span<double> grad_b) {
  if (a.size() != b.size()) throw ShapeError("distance: length mismatch");
  for (size_t k = 0; k < a.size(); ++k) {
    const double g = 2.0 * upstream * (a[k] - b[k]);
    grad_a[k] += g;
    grad_b[k] -= g;
  }
}

}  // namespace fsgcn
