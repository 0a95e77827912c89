/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/model.h
 * \brief Two-layer GCN over one-hot node features with a linear
 *        document classifier.
 *
 * Forward pass (X = I, so the first product reduces to W1):
 *
 *   H1 = ReLU(Â W1)
 *   Z  = ReLU(Â dropout(H1) W2 + b2)          per-node representation
 *   logits = dropout(Z[docs]) Wc + bc         document rows only
 *
 * Dropout is active only in training mode. Z is taken before the second
 * dropout and is the representation the neighborhood regularizer reads.
 */
#ifndef FSGCN_MODEL_H_
#define FSGCN_MODEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsgcn/dense.h"
#include "fsgcn/ops.h"
#include "fsgcn/rng.h"
#include "fsgcn/sparse.h"

namespace fsgcn {

struct GcnParams {
  Parameter w1;  // n_nodes x hidden
  Parameter w2;  // hidden x hidden
  Parameter b2;  // 1 x hidden
  Parameter wc;  // hidden x n_classes
  Parameter bc;  // 1 x n_classes

  int64_t n_nodes() const { return w1.value.rows; }
  int64_t hidden() const { return w1.value.cols; }
  int64_t n_classes() const { return wc.value.cols; }

  std::vector<Parameter*> all() { return {&w1, &w2, &b2, &wc, &bc}; }
  std::vector<const Parameter*> all() const { return {&w1, &w2, &b2, &wc, &bc}; }
  void zero_grad();
};

/// Glorot-uniform weights in ±sqrt(6 / (fan_in + fan_out)); zero biases.
GcnParams init_params(int64_t n_nodes, int64_t hidden, int64_t n_classes, Rng& rng);

struct ForwardOptions {
  bool train = false;
  double dropout = 0.5;  // drop probability
};

struct ForwardOutput {
  int64_t n_docs = 0;
  bool train = false;
  DenseMatrix h1;   // n_nodes x hidden, post-ReLU
  DenseMatrix h1d;  // after dropout (== h1 in evaluation)
  DenseMatrix z;    // n_nodes x hidden, post-ReLU
  DenseMatrix zd;   // n_docs x hidden, doc rows of z after dropout
  DenseMatrix logits;
  std::optional<DropoutMask> mask1;
  std::optional<DropoutMask> mask2;
};

/// `rng` supplies the dropout masks and is only touched in training mode.
ForwardOutput forward(const SparseMatrix& a_hat, int64_t n_docs, const GcnParams& params,
                      const ForwardOptions& options, Rng* rng);

/// Accumulates parameter gradients. `upstream_z` may be empty (no
/// representation loss) or n_nodes x hidden.
void backward(const ForwardOutput& out, const DenseMatrix& upstream_logits,
              const DenseMatrix& upstream_z, GcnParams* params, const SparseMatrix& a_hat);

/// Parameters plus the RNG state and epoch they were captured at.
struct Checkpoint {
  GcnParams params;
  int64_t epoch = 0;
  std::string rng_state;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace fsgcn

#endif  // FSGCN_MODEL_H_
