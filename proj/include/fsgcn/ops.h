/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/ops.h
 * \brief Differentiable kernels with hand-written backward rules:
 *        sparse x dense product, affine map, bias, ReLU, dropout,
 *        softmax cross-entropy and Euclidean distance.
 *
 * Backward functions named *_backward either return the input gradient or
 * accumulate parameter gradients into caller-owned storage, as documented
 * per function. All loops run through simd::kernels().
 */
#ifndef FSGCN_OPS_H_
#define FSGCN_OPS_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fsgcn/dense.h"
#include "fsgcn/rng.h"
#include "fsgcn/sparse.h"

namespace fsgcn {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Y = A X.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x);
/// Y = A^T U by scattering rows.
DenseMatrix spmm_transposed(const SparseMatrix& a, const DenseMatrix& upstream);
/// grad_X = A^T upstream; with `symmetric` the gather form A upstream is used.
DenseMatrix spmm_backward(const SparseMatrix& a, const DenseMatrix& upstream, bool symmetric);

/// Y = X W.
DenseMatrix affine(const DenseMatrix& x, const DenseMatrix& w);
/// grad_W += X^T upstream; grad_X = upstream W^T when grad_x is non-null.
void affine_backward(const DenseMatrix& x, const DenseMatrix& w, const DenseMatrix& upstream,
                     DenseMatrix* grad_w, DenseMatrix* grad_x);

/// Adds the 1 x cols row vector `bias` to every row.
void add_row_bias(DenseMatrix* y, const DenseMatrix& bias);
/// grad_b += column sums of upstream.
void row_bias_backward(const DenseMatrix& upstream, DenseMatrix* grad_b);

DenseMatrix relu(const DenseMatrix& x);
/// upstream masked by (activation > 0); `activation` is the ReLU output.
DenseMatrix relu_backward(const DenseMatrix& upstream, const DenseMatrix& activation);

/// Binary keep-mask; survivors are scaled by 1 / keep_prob when applied.
struct DropoutMask {
  DenseMatrix mask;
  double keep_prob = 1.0;
};
DropoutMask make_dropout_mask(int64_t rows, int64_t cols, double keep_prob, Rng& rng);
DenseMatrix apply_dropout(const DenseMatrix& x, const DropoutMask& mask);
DenseMatrix dropout_backward(const DenseMatrix& upstream, const DropoutMask& mask);

/// Numerically stable softmax of one row (max subtraction).
void softmax_row(std::span<const double> logits, std::span<double> probs);
DenseMatrix softmax(const DenseMatrix& logits);

/// -log softmax(logits[row])[target] for one row.
double cross_entropy_row(std::span<const double> logits, int target);

/// Weighted sum over rows of -log softmax(logits[rows[k]])[targets[k]].
/// Gradient weight_k * (p - onehot) is accumulated into grad_logits when
/// non-null. Equal weights 1/n give the mean.
double softmax_cross_entropy(const DenseMatrix& logits, std::span<const int64_t> rows,
                             std::span<const int> targets, std::span<const double> weights,
                             DenseMatrix* grad_logits);

/// ||a - b||_2.
double euclidean_distance(std::span<const double> a, std::span<const double> b);
/// Accumulates upstream * d||a-b||/da into grad_a and the negation into
/// grad_b. At a == b the zero subgradient is used.
void euclidean_distance_backward(std::span<const double> a, std::span<const double> b, double upstream,
                                 std::span<double> grad_a, std::span<double> grad_b);

double squared_euclidean_distance(std::span<const double> a, std::span<const double> b);
void squared_euclidean_distance_backward(std::span<const double> a, std::span<const double> b,
                                         double upstream, std::span<double> grad_a,
                                         std::span<double> grad_b);

}  // namespace fsgcn

#endif  // FSGCN_OPS_H_
