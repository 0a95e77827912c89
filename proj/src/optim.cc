/*!
 *  Copyright (c) 2026 by Contributors
 * \file optim.cc
 */
#include "fsgcn/optim.h"

#include <cmath>
#include <stdexcept>

#include "fsgcn/simd/kernels.h"

namespace fsgcn {

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "ranger") return OptimizerKind::kRanger;
  if (name == "adam") return OptimizerKind::kAdam;
  throw std::invalid_argument("unknown optimizer '" + name + "' (expected ranger or adam)");
}

const char* optimizer_kind_name(OptimizerKind kind) { return kind == OptimizerKind::kRanger ? "ranger" : "adam"; }

RangerOptimizer::RangerOptimizer(OptimizerOptions options) : options_(options) {
  if (!(options_.lr > 0.0)) throw std::invalid_argument("optimizer: lr must be positive");
  if (options_.beta1 < 0.0 || options_.beta1 >= 1.0 || options_.beta2 < 0.0 || options_.beta2 >= 1.0)
    throw std::invalid_argument("optimizer: betas must lie in [0, 1)");
  if (options_.lookahead_k < 1) throw std::invalid_argument("optimizer: lookahead_k must be >= 1");
  if (options_.lookahead_alpha < 0.0 || options_.lookahead_alpha > 1.0)
    throw std::invalid_argument("optimizer: lookahead_alpha must lie in [0, 1]");
}

void centralize_columns(DenseMatrix* grad) {
  if (grad->rows == 0) return;
  std::vector<double> mean(static_cast<size_t>(grad->cols), 0.0);
  for (int64_t r = 0; r < grad->rows; ++r)
    simd::kernels().axpy(mean.size(), 1.0, grad->row(r).data(), mean.data());
  for (double& m : mean) m /= static_cast<double>(grad->rows);
  for (int64_t r = 0; r < grad->rows; ++r) simd::kernels().axpy(mean.size(), -1.0, mean.data(), grad->row(r).data());
}

double RangerOptimizer::rectification(int64_t t, double beta2) {
  const double rho_inf = 2.0 / (1.0 - beta2) - 1.0;
  const double beta2_t = std::pow(beta2, static_cast<double>(t));
  const double rho_t = rho_inf - 2.0 * static_cast<double>(t) * beta2_t / (1.0 - beta2_t);
  if (rho_t <= 4.0) return 0.0;
  return std::sqrt(((rho_t - 4.0) * (rho_t - 2.0) * rho_inf) / ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
}

void RangerOptimizer::ensure_state(std::span<Parameter* const> params) {
  if (state_.first_moment.size() == params.size()) {
    for (size_t i = 0; i < params.size(); ++i)
      if (!state_.first_moment[i].same_shape(params[i]->value))
        throw std::invalid_argument("optimizer: parameter shapes changed between steps");
    return;
  }
  if (!state_.first_moment.empty()) throw std::invalid_argument("optimizer: parameter list changed between steps");
  reset(params);
}

void RangerOptimizer::reset(std::span<Parameter* const> params) {
  state_ = OptimizerState{};
  for (const Parameter* p : params) {
    state_.first_moment.emplace_back(p->value.rows, p->value.cols);
    state_.second_moment.emplace_back(p->value.rows, p->value.cols);
    state_.slow_weights.push_back(p->value);
  }
}

void RangerOptimizer::step(std::span<Parameter* const> params) {
  ensure_state(params);
  const int64_t t = ++state_.steps;
  const auto& k = simd::kernels();
  const double bias1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t));
  const bool ranger = options_.kind == OptimizerKind::kRanger;
  const double r_t = ranger ? rectification(t, options_.beta2) : 1.0;

  for (size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    DenseMatrix g = p.grad;
    if (options_.weight_decay != 0.0) k.axpy(g.size(), options_.weight_decay, p.value.data.data(), g.data.data());
    if (ranger && options_.gradient_centralization && p.is_matrix()) centralize_columns(&g);

    auto& m = state_.first_moment[i];
    auto& v = state_.second_moment[i];
    k.update_moments(g.size(), options_.beta1, options_.beta2, g.data.data(), m.data.data(), v.data.data());

    double* theta = p.value.data.data();
    const size_t n = g.size();
    if (ranger && r_t == 0.0) {
      const double step = options_.lr / bias1;
      for (size_t e = 0; e < n; ++e) theta[e] -= step * m.data[e];
    } else {
      const double step = options_.lr * r_t / bias1;
      for (size_t e = 0; e < n; ++e) theta[e] -= step * m.data[e] / (std::sqrt(v.data[e] / bias2) + options_.eps);
    }
  }

  if (ranger && t % options_.lookahead_k == 0) {
    for (size_t i = 0; i < params.size(); ++i) {
      auto& slow = state_.slow_weights[i];
      auto& fast = params[i]->value;
      for (size_t e = 0; e < slow.size(); ++e) {
        slow.data[e] += options_.lookahead_alpha * (fast.data[e] - slow.data[e]);
        fast.data[e] = slow.data[e];
      }
    }
  }
}

}  // namespace fsgcn
