/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/experiment.h
 * \brief Corpus -> graph -> train -> evaluate pipelines, result records on
 *        disk and the multi-seed sweep runner.
 *
 * Layout under the output directory:
 *
 *   results/<hash>/run.json        one record per run
 *   results/<hash>/trace.csv       per-epoch losses and validation metrics
 *   results/<hash>/checkpoint.bin  best-validation parameters
 *   results/sweep.csv              one row per grid cell and seed
 *   results/aggregate.csv          mean / std per (setting, preset)
 *   results/table.md               the same numbers as a markdown table
 *   results/edges.csv              adjacency size per graph mode
 */
#ifndef FSGCN_EXPERIMENT_H_
#define FSGCN_EXPERIMENT_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fsgcn/config.h"
#include "fsgcn/trainer.h"
#include "json.hpp"

namespace fsgcn {

/// An error tagged with the pipeline stage that raised it
/// (load-corpus, build-graph, split, train, write-results).
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

TokenizedCorpus load_config_corpus(const TrainConfig& config);

/// Loaded corpora and built graphs shared between runs. Thread-safe; entries
/// are immutable once inserted.
class DataCache {
 public:
  std::shared_ptr<const TokenizedCorpus> corpus(const TrainConfig& config);
  std::shared_ptr<const BuiltGraph> graph(const TrainConfig& config);

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const TokenizedCorpus>> corpora_;
  std::map<std::string, std::shared_ptr<const BuiltGraph>> graphs_;
};

nlohmann::json run_to_json(const TrainConfig& config, const RunResult& result);
RunResult run_from_json(const nlohmann::json& j);
void write_trace_csv(const std::string& path, const std::vector<EpochRecord>& trace);

struct ExperimentOptions {
  std::string out_dir = ".";
  bool force = false;
  bool save_checkpoint = true;
  std::string embeddings_path;  // empty: no export
  std::ostream* log = nullptr;
  int64_t log_every = 100;
};

struct ExperimentRecord {
  RunResult result;
  std::string run_dir;
  bool cached = false;
};

/// results/<hash>/ for the given config.
std::string run_directory(const std::string& out_dir, const TrainConfig& config);

/// Runs one configuration, or reads the existing run.json when present and
/// `force` is off. Errors are rethrown as StageError.
ExperimentRecord run_experiment(const TrainConfig& config, const ExperimentOptions& options,
                                DataCache* cache = nullptr);

struct BudgetSetting {
  int64_t train = 0;
  int64_t validation = 0;
};

struct SweepSpec {
  TrainConfig base;
  std::vector<double> fractions;
  std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<std::string> presets = preset_names();
  std::vector<BudgetSetting> budgets;  // fixed label budgets, run in addition to fractions

  /// Budget grid: `total` labels split train/validation in steps of `step`
  /// (10/90, 20/80, ... 90/10 for total 100, step 10).
  static std::vector<BudgetSetting> budget_grid(int64_t total, int64_t step);
  void validate() const;
};

struct SweepCell {
  std::string preset;
  std::string setting;  // "0.01" or "budget 10/90"
  double fraction = 0.0;
  BudgetSetting budget;
  uint64_t seed = 0;
  std::string config_hash;
  bool ok = false;
  bool cached = false;
  std::string error;
  RunResult result;
};

struct AggregateCell {
  std::string setting;
  std::string preset;
  int64_t runs = 0;
  int64_t failed = 0;
  double mean = 0.0;  // percent
  double std = 0.0;   // percent, sample standard deviation
};

struct EdgeCount {
  std::string graph_mode;
  int64_t n_nodes = 0;
  int64_t nnz = 0;
  int64_t off_diagonal_nnz = 0;
};

struct SweepSummary {
  std::vector<SweepCell> cells;
  std::vector<AggregateCell> aggregates;
  std::vector<EdgeCount> edges;
};

struct SweepOptions {
  std::string out_dir = ".";
  bool force = false;
  int64_t jobs = 1;
  std::ostream* log = nullptr;
};

/// Every (setting, preset, seed) configuration in grid order.
std::vector<std::pair<SweepCell, TrainConfig>> enumerate_sweep(const SweepSpec& spec);

/// Mean and sample standard deviation of test accuracy per (setting,
/// preset) over the successful cells.
std::vector<AggregateCell> aggregate(const std::vector<SweepCell>& cells);

/// Runs the grid on up to `jobs` threads, then writes sweep.csv,
/// aggregate.csv, table.md and edges.csv. Failed cells are recorded and
/// skipped by the aggregation.
SweepSummary run_sweep(const SweepSpec& spec, const SweepOptions& options);

std::string format_table(const std::vector<AggregateCell>& aggregates);

}  // namespace fsgcn

#endif  // FSGCN_EXPERIMENT_H_
