/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/objectives.h
 * \brief Training objectives: supervised cross-entropy gated by training
 *        signal annealing, 2-hop neighborhood regularization with its
 *        triplet sampler, and class-balanced pseudo-labeling.
 */
#ifndef FSGCN_OBJECTIVES_H_
#define FSGCN_OBJECTIVES_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fsgcn/corpus.h"
#include "fsgcn/dense.h"
#include "fsgcn/graph.h"
#include "fsgcn/rng.h"

namespace fsgcn {

// ---------------------------------------------------------------------------
// Neighborhood regularization
// ---------------------------------------------------------------------------

/// anchor -> bridge word -> positive document; negative lies outside the
/// bridge's neighborhood. All fields are node indices.
struct TripletSample {
  int64_t anchor;
  int64_t bridge;
  int64_t positive;
  int64_t negative;
};

/// Node-type path walked from the anchor to the positive. Only the
/// document -> word -> document path (K = 2) exists today.
enum class HopPath { kDocWordDoc };

struct TripletBatch {
  std::vector<TripletSample> triplets;
  int64_t skipped_no_words = 0;     // anchors without a word neighbor
  int64_t skipped_no_negative = 0;  // bridge connected to every document
};

/// One triplet per anchor: bridge ~ Multinomial over the anchor's word
/// neighbors weighted by raw adjacency (TF-IDF) values; positive uniform over
/// the documents adjacent to the bridge (the anchor included); negative
/// uniform over the remaining documents.
TripletBatch sample_triplets(const WordDocumentGraph& graph, std::span<const int64_t> anchor_pool, Rng& rng,
                             HopPath path = HopPath::kDocWordDoc);

enum class DistanceKind { kEuclidean, kSquaredEuclidean };

struct RepresentationLoss {
  double loss = 0.0;
  DenseMatrix grad_z;  // same shape as z
  int64_t active = 0;  // triplets with a positive hinge
};

/// Mean over triplets of max(d(u, u+) - d(u, u-) + margin, 0).
RepresentationLoss loss_2nr(const DenseMatrix& z, std::span<const TripletSample> triplets, double margin,
                            DistanceKind distance = DistanceKind::kEuclidean);

// ---------------------------------------------------------------------------
// Training signal annealing
// ---------------------------------------------------------------------------

struct TsaSchedule {
  int64_t total_steps = 1000;
  int64_t n_classes = 2;
};

/// Log schedule: alpha = 1 - exp(-5 t / T); threshold = alpha (1 - 1/C) + 1/C.
double tsa_threshold(int64_t step, const TsaSchedule& schedule);

// ---------------------------------------------------------------------------
// Supervised and pseudo-label losses
// ---------------------------------------------------------------------------

struct LabeledNode {
  int64_t node;  // document node == logits row
  int label;
};

struct LogitLoss {
  double loss = 0.0;
  DenseMatrix grad_logits;
  int64_t used = 0;    // examples that contributed
  int64_t masked = 0;  // examples hidden by the TSA gate
};

/// Cross-entropy over train documents. With `tsa_active`, examples whose
/// true-class probability exceeds `threshold` are dropped and the remainder
/// averaged. Every node must carry the train tag in `splits`.
LogitLoss loss_supervised(const DenseMatrix& logits, std::span<const LabeledNode> labeled,
                          const SplitAssignment& splits, double threshold, bool tsa_active);

/// Plain mean cross-entropy, no gating or leakage guard (validation loss).
double mean_cross_entropy(const DenseMatrix& logits, std::span<const LabeledNode> labeled);

enum class ThresholdDirection {
  kAtLeast,  // keep max probability >= beta
  kAtMost,   // keep max probability <= beta
};

struct PseudoLabelBatch {
  std::vector<int64_t> nodes;
  std::vector<int> labels;
  std::vector<double> weights;  // 1 / N_label
};

/// Confident argmax predictions among `eligible`, weighted by the inverse
/// count of nodes sharing the same pseudo-label.
PseudoLabelBatch select_pseudo_labels(const DenseMatrix& logits, std::span<const int64_t> eligible, double beta,
                                      ThresholdDirection direction = ThresholdDirection::kAtLeast);

struct PseudoLoss {
  double loss = 0.0;
  DenseMatrix grad_logits;
  PseudoLabelBatch batch;
};

/// sum_i (1 / N_i) CE(argmax F_i, F_i); the pseudo-labels are constants.
PseudoLoss loss_pseudo(const DenseMatrix& logits, std::span<const int64_t> eligible, double beta,
                       ThresholdDirection direction = ThresholdDirection::kAtLeast);

// ---------------------------------------------------------------------------
// Combination
// ---------------------------------------------------------------------------

struct LossWeights {
  double lambda_2nr = 1.0;
  double lambda_pseudo = 1.0;
  bool enable_2nr = false;
  bool enable_pseudo = false;
};

/// L_sup + lambda_2nr L_2nr + lambda_pse L_pse; disabled terms add exactly 0.
double total_loss(double supervised, double l2nr, double pseudo, const LossWeights& weights);

}  // namespace fsgcn

#endif  // FSGCN_OBJECTIVES_H_
