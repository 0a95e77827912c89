/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/optim.h
 * \brief Ranger: rectified Adam moments, Lookahead slow weights and
 *        gradient centralization, for full-batch updates.
 */
#ifndef FSGCN_OPTIM_H_
#define FSGCN_OPTIM_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsgcn/dense.h"

namespace fsgcn {

enum class OptimizerKind { kRanger, kAdam };

OptimizerKind parse_optimizer_kind(const std::string& name);
const char* optimizer_kind_name(OptimizerKind kind);

struct OptimizerOptions {
  OptimizerKind kind = OptimizerKind::kRanger;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int64_t lookahead_k = 6;
  double lookahead_alpha = 0.5;
  bool gradient_centralization = true;  // matrix parameters only
  double weight_decay = 0.0;            // L2 term folded into the gradient
};

/// Per-parameter moments and slow weights; `steps` counts calls to step().
struct OptimizerState {
  std::vector<DenseMatrix> first_moment;
  std::vector<DenseMatrix> second_moment;
  std::vector<DenseMatrix> slow_weights;
  int64_t steps = 0;
};

class RangerOptimizer {
 public:
  explicit RangerOptimizer(OptimizerOptions options = {});

  /// Applies one update to every parameter from its current gradient.
  /// Gradients are read, not cleared.
  void step(std::span<Parameter* const> params);

  /// Zero moments, t = 0, slow weights = current parameter values.
  void reset(std::span<Parameter* const> params);

  const OptimizerState& state() const { return state_; }
  const OptimizerOptions& options() const { return options_; }

  /// Rectification term r_t, or 0 when the variance estimate is not yet
  /// tractable (rho_t <= 4) and the momentum-only step is taken.
  static double rectification(int64_t t, double beta2);

 private:
  void ensure_state(std::span<Parameter* const> params);

  OptimizerOptions options_;
  OptimizerState state_;
};

/// Subtracts each column's mean over rows, in place.
void centralize_columns(DenseMatrix* grad);

}  // namespace fsgcn

#endif  // FSGCN_OPTIM_H_
