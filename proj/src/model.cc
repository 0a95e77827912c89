/*!
 *  Copyright (c) 2026 by Contributors
 * \file model.cc
 */
#include "fsgcn/model.h"

#include <cmath>
#include <stdexcept>

#include "binary_io.h"

namespace fsgcn {

namespace {

void glorot(Parameter* p, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(p->value.rows + p->value.cols));
  for (double& v : p->value.data) v = bound * (2.0 * rng.uniform() - 1.0);
}

DenseMatrix doc_rows(const DenseMatrix& m, int64_t n_docs) {
  DenseMatrix out(n_docs, m.cols);
  std::copy(m.data.begin(), m.data.begin() + n_docs * m.cols, out.data.begin());
  return out;
}

}  // namespace

void GcnParams::zero_grad() {
  for (Parameter* p : all()) p->zero_grad();
}

GcnParams init_params(int64_t n_nodes, int64_t hidden, int64_t n_classes, Rng& rng) {
  if (n_nodes <= 0 || hidden <= 0 || n_classes <= 0)
    throw std::invalid_argument("init_params: dimensions must be positive");
  GcnParams p;
  p.w1 = Parameter("w1", n_nodes, hidden);
  p.w2 = Parameter("w2", hidden, hidden);
  p.b2 = Parameter("b2", 1, hidden);
  p.wc = Parameter("wc", hidden, n_classes);
  p.bc = Parameter("bc", 1, n_classes);
  glorot(&p.w1, rng);
  glorot(&p.w2, rng);
  glorot(&p.wc, rng);
  return p;
}

ForwardOutput forward(const SparseMatrix& a_hat, int64_t n_docs, const GcnParams& params,
                      const ForwardOptions& options, Rng* rng) {
  if (a_hat.rows != a_hat.cols || a_hat.rows != params.n_nodes())
    throw ShapeError("forward: adjacency is " + std::to_string(a_hat.rows) + "x" + std::to_string(a_hat.cols) +
                     " but W1 has " + std::to_string(params.n_nodes()) + " rows");
  if (n_docs < 0 || n_docs > params.n_nodes()) throw ShapeError("forward: document count out of range");
  if (params.w2.value.rows != params.hidden() || params.wc.value.rows != params.w2.value.cols)
    throw ShapeError("forward: inconsistent hidden sizes");
  const bool use_dropout = options.train && options.dropout > 0.0;
  if (use_dropout && !rng) throw std::invalid_argument("forward: training mode needs an rng");

  ForwardOutput out;
  out.n_docs = n_docs;
  out.train = options.train;
  const double keep = 1.0 - options.dropout;

  out.h1 = relu(spmm(a_hat, params.w1.value));
  if (use_dropout) {
    out.mask1 = make_dropout_mask(out.h1.rows, out.h1.cols, keep, *rng);
    out.h1d = apply_dropout(out.h1, *out.mask1);
  } else {
    out.h1d = out.h1;
  }

  DenseMatrix pre2 = spmm(a_hat, affine(out.h1d, params.w2.value));
  add_row_bias(&pre2, params.b2.value);
  out.z = relu(pre2);

  DenseMatrix z_docs = doc_rows(out.z, n_docs);
  if (use_dropout) {
    out.mask2 = make_dropout_mask(z_docs.rows, z_docs.cols, keep, *rng);
    out.zd = apply_dropout(z_docs, *out.mask2);
  } else {
    out.zd = std::move(z_docs);
  }

  out.logits = affine(out.zd, params.wc.value);
  add_row_bias(&out.logits, params.bc.value);
  return out;
}

void backward(const ForwardOutput& out, const DenseMatrix& upstream_logits, const DenseMatrix& upstream_z,
              GcnParams* params, const SparseMatrix& a_hat) {
  if (out.h1.empty() || out.z.empty() || out.logits.empty())
    throw std::logic_error("backward: forward cache missing");
  if (!upstream_logits.same_shape(out.logits)) throw ShapeError("backward: logit gradient shape mismatch");
  if (!upstream_z.empty() && !upstream_z.same_shape(out.z)) throw ShapeError("backward: z gradient shape mismatch");

  // Classifier head.
  DenseMatrix grad_zd;
  affine_backward(out.zd, params->wc.value, upstream_logits, &params->wc.grad, &grad_zd);
  row_bias_backward(upstream_logits, &params->bc.grad);

  DenseMatrix grad_z = upstream_z.empty() ? DenseMatrix(out.z.rows, out.z.cols) : upstream_z;
  const DenseMatrix grad_z_docs = out.mask2 ? dropout_backward(grad_zd, *out.mask2) : grad_zd;
  for (size_t k = 0; k < grad_z_docs.size(); ++k) grad_z.data[k] += grad_z_docs.data[k];

  // Second GCN layer.
  const DenseMatrix grad_pre2 = relu_backward(grad_z, out.z);
  row_bias_backward(grad_pre2, &params->b2.grad);
  const DenseMatrix grad_t = spmm_backward(a_hat, grad_pre2, true);
  DenseMatrix grad_h1d;
  affine_backward(out.h1d, params->w2.value, grad_t, &params->w2.grad, &grad_h1d);

  // First GCN layer; Â W1 is linear in W1 with the one-hot input elided.
  const DenseMatrix grad_h1 = out.mask1 ? dropout_backward(grad_h1d, *out.mask1) : grad_h1d;
  const DenseMatrix grad_pre1 = relu_backward(grad_h1, out.h1);
  const DenseMatrix grad_w1 = spmm_backward(a_hat, grad_pre1, true);
  for (size_t k = 0; k < grad_w1.size(); ++k) params->w1.grad.data[k] += grad_w1.data[k];
}

namespace {
constexpr uint32_t kCheckpointVersion = 1;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  io::Writer w(path);
  w.magic("FSCK");
  w.pod<uint32_t>(kCheckpointVersion);
  w.pod<int64_t>(ckpt.epoch);
  const auto params = ckpt.params.all();
  w.pod<uint32_t>(static_cast<uint32_t>(params.size()));
  for (const Parameter* p : params) {
    w.str(p->name);
    w.pod<int64_t>(p->value.rows);
    w.pod<int64_t>(p->value.cols);
    w.vec(p->value.data);
  }
  w.str(ckpt.rng_state);
  w.finish();
}

Checkpoint load_checkpoint(const std::string& path) {
  io::Reader r(path);
  r.expect_magic("FSCK");
  const auto version = r.pod<uint32_t>();
  if (version != kCheckpointVersion)
    throw std::runtime_error(path + ": unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  ckpt.epoch = r.pod<int64_t>();
  const auto count = r.pod<uint32_t>();
  auto params = ckpt.params.all();
  if (count != params.size()) throw std::runtime_error(path + ": unexpected parameter count");
  for (Parameter* p : params) {
    const std::string name = r.str();
    const auto rows = r.pod<int64_t>();
    const auto cols = r.pod<int64_t>();
    *p = Parameter(name, rows, cols);
    p->value.data = r.vec<double>();
    if (p->value.data.size() != static_cast<size_t>(rows * cols))
      throw std::runtime_error(path + ": parameter '" + name + "' has inconsistent size");
  }
  if (ckpt.params.w1.name != "w1" || ckpt.params.wc.name != "wc")
    throw std::runtime_error(path + ": unexpected parameter layout");
  ckpt.rng_state = r.str();
  return ckpt;
}

}  // namespace fsgcn
