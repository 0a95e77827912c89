/*!
 *  Copyright (c) 2026 by Contributors
 * \file losses.cc
 */
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "fsgcn/objectives.h"
#include "fsgcn/ops.h"

namespace fsgcn {

RepresentationLoss loss_2nr(const DenseMatrix& z, std::span<const TripletSample> triplets, double margin,
                            DistanceKind distance) {
  if (margin < 0.0) throw std::invalid_argument("loss_2nr: margin must be non-negative");
  RepresentationLoss out;
  out.grad_z = DenseMatrix(z.rows, z.cols);
  if (triplets.empty()) return out;
  const double scale = 1.0 / static_cast<double>(triplets.size());

  auto dist = [&](int64_t a, int64_t b) {
    return distance == DistanceKind::kEuclidean ? euclidean_distance(z.row(a), z.row(b))
                                                : squared_euclidean_distance(z.row(a), z.row(b));
  };
  auto dist_backward = [&](int64_t a, int64_t b, double upstream) {
    if (distance == DistanceKind::kEuclidean) {
      euclidean_distance_backward(z.row(a), z.row(b), upstream, out.grad_z.row(a), out.grad_z.row(b));
    } else if (a != b) {
      squared_euclidean_distance_backward(z.row(a), z.row(b), upstream, out.grad_z.row(a), out.grad_z.row(b));
    }
  };

  for (const auto& t : triplets) {
    if (t.anchor < 0 || t.anchor >= z.rows || t.positive < 0 || t.positive >= z.rows || t.negative < 0 ||
        t.negative >= z.rows)
      throw std::out_of_range("loss_2nr: triplet references a node outside z");
    const double hinge = dist(t.anchor, t.positive) - dist(t.anchor, t.negative) + margin;
    if (hinge <= 0.0) continue;
    ++out.active;
    out.loss += scale * hinge;
    dist_backward(t.anchor, t.positive, scale);
    dist_backward(t.anchor, t.negative, -scale);
  }
  return out;
}

double tsa_threshold(int64_t step, const TsaSchedule& schedule) {
  if (schedule.total_steps <= 0 || schedule.n_classes <= 0)
    throw std::invalid_argument("tsa_threshold: schedule needs positive steps and classes");
  if (step < 0 || step > schedule.total_steps) throw std::out_of_range("tsa_threshold: step outside [0, T]");
  const double chance = 1.0 / static_cast<double>(schedule.n_classes);
  const double progress = static_cast<double>(step) / static_cast<double>(schedule.total_steps);
  const double alpha = 1.0 - std::exp(-progress * 5.0);
  return alpha * (1.0 - chance) + chance;
}

LogitLoss loss_supervised(const DenseMatrix& logits, std::span<const LabeledNode> labeled,
                          const SplitAssignment& splits, double threshold, bool tsa_active) {
  LogitLoss out;
  out.grad_logits = DenseMatrix(logits.rows, logits.cols);
  std::vector<int64_t> rows;
  std::vector<int> targets;
  std::vector<double> probs(static_cast<size_t>(logits.cols));
  for (const auto& ln : labeled) {
    if (ln.node < 0 || static_cast<size_t>(ln.node) >= splits.tags.size() || splits.tags[ln.node] != SplitTag::kTrain)
      throw std::logic_error("loss_supervised: node " + std::to_string(ln.node) + " is not a train document");
    if (ln.label < 0 || ln.label >= logits.cols) throw std::out_of_range("loss_supervised: label out of range");
    if (tsa_active) {
      softmax_row(logits.row(ln.node), probs);
      if (probs[ln.label] > threshold) {
        ++out.masked;
        continue;
      }
    }
    rows.push_back(ln.node);
    targets.push_back(ln.label);
  }
  out.used = static_cast<int64_t>(rows.size());
  if (rows.empty()) return out;
  const std::vector<double> weights(rows.size(), 1.0 / static_cast<double>(rows.size()));
  out.loss = softmax_cross_entropy(logits, rows, targets, weights, &out.grad_logits);
  return out;
}

double mean_cross_entropy(const DenseMatrix& logits, std::span<const LabeledNode> labeled) {
  if (labeled.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ln : labeled) total += cross_entropy_row(logits.row(ln.node), ln.label);
  return total / static_cast<double>(labeled.size());
}

PseudoLabelBatch select_pseudo_labels(const DenseMatrix& logits, std::span<const int64_t> eligible, double beta,
                                      ThresholdDirection direction) {
  PseudoLabelBatch batch;
  std::vector<double> probs(static_cast<size_t>(logits.cols));
  std::map<int, int64_t> per_label;
  for (int64_t node : eligible) {
    if (node < 0 || node >= logits.rows) throw std::out_of_range("select_pseudo_labels: node out of range");
    softmax_row(logits.row(node), probs);
    const auto best = std::max_element(probs.begin(), probs.end());
    const double confidence = *best;
    const bool keep = direction == ThresholdDirection::kAtLeast ? confidence >= beta : confidence <= beta;
    if (!keep) continue;
    const int label = static_cast<int>(best - probs.begin());
    batch.nodes.push_back(node);
    batch.labels.push_back(label);
    ++per_label[label];
  }
  batch.weights.reserve(batch.nodes.size());
  for (int label : batch.labels) batch.weights.push_back(1.0 / static_cast<double>(per_label[label]));
  return batch;
}

PseudoLoss loss_pseudo(const DenseMatrix& logits, std::span<const int64_t> eligible, double beta,
                       ThresholdDirection direction) {
  PseudoLoss out;
  out.grad_logits = DenseMatrix(logits.rows, logits.cols);
  out.batch = select_pseudo_labels(logits, eligible, beta, direction);
  if (out.batch.nodes.empty()) return out;
  out.loss = softmax_cross_entropy(logits, out.batch.nodes, out.batch.labels, out.batch.weights, &out.grad_logits);
  return out;
}

double total_loss(double supervised, double l2nr, double pseudo, const LossWeights& weights) {
  if (weights.lambda_2nr < 0.0 || weights.lambda_pseudo < 0.0)
    throw std::invalid_argument("total_loss: loss weights must be non-negative");
  double total = supervised;
  if (weights.enable_2nr) total += weights.lambda_2nr * l2nr;
  if (weights.enable_pseudo) total += weights.lambda_pseudo * pseudo;
  return total;
}

}  // namespace fsgcn
