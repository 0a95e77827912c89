/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/trainer.h
 * \brief Full-batch training with model selection on validation loss,
 *        evaluation and embedding export.
 */
#ifndef FSGCN_TRAINER_H_
#define FSGCN_TRAINER_H_

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsgcn/config.h"
#include "fsgcn/corpus.h"
#include "fsgcn/graph.h"
#include "fsgcn/model.h"

namespace fsgcn {

/// A non-finite loss; the message names the epoch and the component.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpochRecord {
  int64_t epoch = 0;  // 1-based
  double supervised = 0.0;
  double l2nr = 0.0;
  double pseudo = 0.0;
  double total = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double tsa_threshold = 1.0;
  int64_t tsa_masked = 0;
  int64_t triplets = 0;
  int64_t pseudo_labeled = 0;

  bool operator==(const EpochRecord&) const = default;
};

struct RunResult {
  int64_t best_epoch = 0;
  double best_val_loss = 0.0;
  double test_accuracy = 0.0;  // NaN when the corpus has no test documents
  std::vector<EpochRecord> trace;
  std::string config_hash;
  uint64_t seed = 0;
  double wall_seconds = 0.0;
  int64_t n_train = 0, n_validation = 0, n_unlabeled = 0, n_test = 0;
  int64_t n_nodes = 0, n_edges = 0;
};

struct TrainOutcome {
  RunResult result;
  Checkpoint best;
};

/// Inputs shared by train / evaluate / export. All three refer to the same
/// corpus; document i is node i.
struct TrainingData {
  const TokenizedCorpus& corpus;
  const WordDocumentGraph& graph;
  const SplitAssignment& splits;
};

/// Per epoch: forward (train mode), enabled losses, backward, optimizer step,
/// evaluation-mode forward for the validation loss. The parameters from the
/// epoch with the lowest validation loss (earliest on ties) are returned.
/// Progress lines go to `log` every `log_every` epochs when non-null.
TrainOutcome train(const TrainingData& data, const TrainConfig& config, std::ostream* log = nullptr,
                   int64_t log_every = 100);

/// Evaluation-mode predictions (argmax class) for every document.
std::vector<int> predict(const Checkpoint& ckpt, const WordDocumentGraph& graph);

/// Fraction of `tag` documents whose argmax logit is the gold label.
/// kUnlabeled throws; an empty split yields NaN.
double evaluate(const Checkpoint& ckpt, const TrainingData& data, SplitTag tag);

/// CSV rows: node_id, node_type, split, z_0..z_{h-1}, predicted (documents
/// only). One row per node.
void export_embeddings(const Checkpoint& ckpt, const TrainingData& data, const std::vector<std::string>& words,
                       const std::string& path);

}  // namespace fsgcn

#endif  // FSGCN_TRAINER_H_
