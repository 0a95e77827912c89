/*!
 *  Copyright (c) 2026 by Contributors
 * \file trainer.cc
 */
#include "fsgcn/trainer.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "fsgcn/objectives.h"
#include "fsgcn/optim.h"

namespace fsgcn {

namespace {

std::vector<LabeledNode> labeled_nodes(const TrainingData& data, SplitTag tag) {
  std::vector<LabeledNode> out;
  for (size_t i = 0; i < data.splits.tags.size(); ++i) {
    if (data.splits.tags[i] != tag) continue;
    const int label = data.corpus.label_index(i);
    if (label < 0) throw std::logic_error("document " + data.corpus.docs[i].id + " is tagged " + split_tag_name(tag) +
                                          " but has no label");
    out.push_back({static_cast<int64_t>(i), label});
  }
  return out;
}

double accuracy(const DenseMatrix& logits, const std::vector<LabeledNode>& nodes) {
  if (nodes.empty()) return std::numeric_limits<double>::quiet_NaN();
  int64_t correct = 0;
  for (const auto& ln : nodes) {
    const auto row = logits.row(ln.node);
    const auto best = std::max_element(row.begin(), row.end()) - row.begin();
    if (best == ln.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

void check_finite(double value, int64_t epoch, const char* component) {
  if (!std::isfinite(value))
    throw TrainingError("non-finite " + std::string(component) + " loss at epoch " + std::to_string(epoch));
}

void check_compatible(const Checkpoint& ckpt, const WordDocumentGraph& graph) {
  if (ckpt.params.n_nodes() != graph.indexing.n_nodes())
    throw std::invalid_argument("checkpoint has " + std::to_string(ckpt.params.n_nodes()) + " node embeddings, graph has " +
                                std::to_string(graph.indexing.n_nodes()) + " nodes");
}

void validate_inputs(const TrainingData& data) {
  if (data.splits.tags.size() != data.corpus.size() ||
      static_cast<size_t>(data.graph.indexing.n_docs) != data.corpus.size())
    throw std::invalid_argument("graph, corpus and splits disagree on the number of documents");
}

}  // namespace

TrainOutcome train(const TrainingData& data, const TrainConfig& config, std::ostream* log, int64_t log_every) {
  config.validate();
  validate_inputs(data);
  const auto start = std::chrono::steady_clock::now();
  const auto& graph = data.graph;
  const int64_t n_docs = graph.indexing.n_docs;
  const auto n_classes = static_cast<int64_t>(data.corpus.classes.size());
  if (n_classes < 1) throw std::invalid_argument("corpus has no labels");

  const auto train_nodes = labeled_nodes(data, SplitTag::kTrain);
  const auto val_nodes = labeled_nodes(data, SplitTag::kValidation);
  if (train_nodes.empty()) throw std::invalid_argument("empty train split");
  if (val_nodes.empty()) throw std::invalid_argument("empty validation split");
  const auto unlabeled = data.splits.indices_of(SplitTag::kUnlabeled);
  std::vector<int64_t> anchors;
  for (int64_t d = 0; d < n_docs; ++d)
    if (config.anchor_pool == AnchorPool::kAll || data.splits.tags[d] != SplitTag::kTest) anchors.push_back(d);

  Rng init_rng = derive_stream(config.seed, "init");
  Rng dropout_rng = derive_stream(config.seed, "dropout");
  Rng triplet_rng = derive_stream(config.seed, "triplets");

  GcnParams params = init_params(graph.indexing.n_nodes(), config.hidden, n_classes, init_rng);
  auto param_list = params.all();
  RangerOptimizer optimizer(config.optimizer_options());

  const TsaSchedule schedule{config.epochs, n_classes};
  const bool tsa = config.tsa_active();
  const LossWeights weights{config.lambda_2nr, config.lambda_pseudo, config.enable_2nr, config.enable_pseudo};
  const ForwardOptions train_mode{true, config.dropout};
  const ForwardOptions eval_mode{false, config.dropout};

  TrainOutcome outcome;
  RunResult& result = outcome.result;
  result.config_hash = config.hash();
  result.seed = config.seed;
  result.n_train = static_cast<int64_t>(train_nodes.size());
  result.n_validation = static_cast<int64_t>(val_nodes.size());
  result.n_unlabeled = static_cast<int64_t>(unlabeled.size());
  result.n_test = data.splits.count(SplitTag::kTest);
  result.n_nodes = graph.indexing.n_nodes();
  result.n_edges = graph.adjacency.nnz();
  result.best_val_loss = std::numeric_limits<double>::infinity();
  bool warned_skips = false;

  for (int64_t epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    params.zero_grad();

    const ForwardOutput out = forward(graph.normalized, n_docs, params, train_mode, &dropout_rng);
    rec.tsa_threshold = tsa ? tsa_threshold(epoch - 1, schedule) : 1.0;
    LogitLoss sup = loss_supervised(out.logits, train_nodes, data.splits, rec.tsa_threshold, tsa);
    rec.supervised = sup.loss;
    rec.tsa_masked = sup.masked;
    check_finite(rec.supervised, epoch, "supervised");
    DenseMatrix grad_logits = std::move(sup.grad_logits);

    if (config.enable_pseudo) {
      PseudoLoss pse = loss_pseudo(out.logits, unlabeled, config.beta, config.pseudo_threshold_direction);
      rec.pseudo = pse.loss;
      rec.pseudo_labeled = static_cast<int64_t>(pse.batch.nodes.size());
      check_finite(rec.pseudo, epoch, "pseudo-label");
      for (size_t k = 0; k < grad_logits.size(); ++k) grad_logits.data[k] += config.lambda_pseudo * pse.grad_logits.data[k];
    }

    DenseMatrix grad_z;
    if (config.enable_2nr) {
      const TripletBatch batch = sample_triplets(graph, anchors, triplet_rng);
      if (log && !warned_skips && (batch.skipped_no_words > 0 || batch.skipped_no_negative > 0)) {
        *log << "warning: 2-NR skipped " << batch.skipped_no_words << " anchors without words and "
             << batch.skipped_no_negative << " bridges adjacent to every document\n";
        warned_skips = true;
      }
      RepresentationLoss reg = loss_2nr(out.z, batch.triplets, config.margin, config.distance);
      rec.l2nr = reg.loss;
      rec.triplets = static_cast<int64_t>(batch.triplets.size());
      check_finite(rec.l2nr, epoch, "2-NR");
      grad_z = std::move(reg.grad_z);
      for (double& g : grad_z.data) g *= config.lambda_2nr;
    }

    rec.total = total_loss(rec.supervised, rec.l2nr, rec.pseudo, weights);
    backward(out, grad_logits, grad_z, &params, graph.normalized);
    optimizer.step(param_list);

    const ForwardOutput eval = forward(graph.normalized, n_docs, params, eval_mode, nullptr);
    rec.val_loss = mean_cross_entropy(eval.logits, val_nodes);
    rec.val_accuracy = accuracy(eval.logits, val_nodes);
    check_finite(rec.val_loss, epoch, "validation");

    if (rec.val_loss < result.best_val_loss) {
      result.best_val_loss = rec.val_loss;
      result.best_epoch = epoch;
      outcome.best.params = params;
      outcome.best.epoch = epoch;
      outcome.best.rng_state = dropout_rng.state();
    }
    result.trace.push_back(rec);

    if (log && log_every > 0 && (epoch % log_every == 0 || epoch == 1)) {
      *log << "epoch " << std::setw(5) << epoch << "  loss " << std::fixed << std::setprecision(4) << rec.total
           << "  sup " << rec.supervised << "  2nr " << rec.l2nr << "  pse " << rec.pseudo << "  val_loss "
           << rec.val_loss << "  val_acc " << rec.val_accuracy << std::defaultfloat << "\n";
    }
  }

  for (Parameter* p : outcome.best.params.all()) p->zero_grad();
  result.test_accuracy = evaluate(outcome.best, data, SplitTag::kTest);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

std::vector<int> predict(const Checkpoint& ckpt, const WordDocumentGraph& graph) {
  check_compatible(ckpt, graph);
  const ForwardOutput out = forward(graph.normalized, graph.indexing.n_docs, ckpt.params, ForwardOptions{}, nullptr);
  std::vector<int> pred(static_cast<size_t>(out.logits.rows));
  for (int64_t i = 0; i < out.logits.rows; ++i) {
    const auto row = out.logits.row(i);
    pred[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return pred;
}

double evaluate(const Checkpoint& ckpt, const TrainingData& data, SplitTag tag) {
  if (tag == SplitTag::kUnlabeled) throw std::invalid_argument("evaluate: the unlabeled split has no gold labels");
  validate_inputs(data);
  check_compatible(ckpt, data.graph);
  const auto nodes = labeled_nodes(data, tag);
  const ForwardOutput out =
      forward(data.graph.normalized, data.graph.indexing.n_docs, ckpt.params, ForwardOptions{}, nullptr);
  return accuracy(out.logits, nodes);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void export_embeddings(const Checkpoint& ckpt, const TrainingData& data, const std::vector<std::string>& words,
                       const std::string& path) {
  validate_inputs(data);
  check_compatible(ckpt, data.graph);
  const auto& ix = data.graph.indexing;
  if (static_cast<int64_t>(words.size()) != ix.n_words)
    throw std::invalid_argument("export_embeddings: word list does not match the graph");
  const ForwardOutput out = forward(data.graph.normalized, ix.n_docs, ckpt.params, ForwardOptions{}, nullptr);

  std::ofstream csv(path);
  if (!csv) throw std::runtime_error("cannot open for writing: " + path);
  csv << std::setprecision(17);
  csv << "node_id,node_type,split";
  for (int64_t k = 0; k < out.z.cols; ++k) csv << ",z_" << k;
  csv << ",predicted\n";
  for (int64_t node = 0; node < ix.n_nodes(); ++node) {
    if (ix.is_doc(node)) {
      csv << csv_field(data.corpus.docs[node].id) << ",document," << split_tag_name(data.splits.tags[node]);
    } else {
      csv << csv_field(words[ix.word_of(node)]) << ",word,";
    }
    for (double v : out.z.row(node)) csv << "," << v;
    csv << ",";
    if (ix.is_doc(node)) {
      const auto row = out.logits.row(node);
      const auto best = std::max_element(row.begin(), row.end()) - row.begin();
      csv << csv_field(data.corpus.classes[best]);
    }
    csv << "\n";
  }
  if (!csv) throw std::runtime_error("write failed: " + path);
}

}  // namespace fsgcn
