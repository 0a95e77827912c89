/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/config.h
 * \brief Run configuration, method presets and the flat key=value format.
 *
 * Keys (defaults in parentheses):
 *
 *   corpus, test_corpus, format (jsonl)
 *   graph_mode (doc-word), window (20), min_freq (5), pmi_counting (presence)
 *   fraction (0.01), split_mode (auto), budget_train, budget_val (0 = off),
 *   stratified (false), seed (1)
 *   epochs (1000), lr (0.01), dropout (0.5), hidden (64)
 *   optimizer (ranger), lookahead_k (6), lookahead_alpha (0.5), gc (true),
 *   weight_decay (0)
 *   enable_2nr, enable_pseudo (false), tsa (auto: on with 2-NR)
 *   margin (1.0), distance (euclidean), lambda_2nr (1), lambda_pseudo (1),
 *   beta (0.75), pseudo_threshold_direction (at-least), anchor_pool (non-test)
 */
#ifndef FSGCN_CONFIG_H_
#define FSGCN_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fsgcn/corpus.h"
#include "fsgcn/graph.h"
#include "fsgcn/objectives.h"
#include "fsgcn/optim.h"

namespace fsgcn {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class TsaMode { kAuto, kOn, kOff };
enum class SplitModeSetting { kAuto, kLow, kHigh };
enum class AnchorPool { kNonTest, kAll };

struct TrainConfig {
  // data
  std::string corpus;
  std::string test_corpus;
  std::string format = "jsonl";
  // graph
  GraphMode graph_mode = GraphMode::kDocWordOnly;
  int64_t window = 20;
  int64_t min_freq = 5;
  PmiCounting pmi_counting = PmiCounting::kPresence;
  // split
  double fraction = 0.01;
  SplitModeSetting split_mode = SplitModeSetting::kAuto;
  int64_t budget_train = 0;
  int64_t budget_val = 0;
  bool stratified = false;
  uint64_t seed = 1;
  // model and optimization
  int64_t epochs = 1000;
  double lr = 0.01;
  double dropout = 0.5;
  int64_t hidden = 64;
  OptimizerKind optimizer = OptimizerKind::kRanger;
  int64_t lookahead_k = 6;
  double lookahead_alpha = 0.5;
  bool gc = true;
  double weight_decay = 0.0;
  // objectives
  bool enable_2nr = false;
  bool enable_pseudo = false;
  TsaMode tsa = TsaMode::kAuto;
  double margin = 1.0;
  DistanceKind distance = DistanceKind::kEuclidean;
  double lambda_2nr = 1.0;
  double lambda_pseudo = 1.0;
  double beta = 0.75;
  ThresholdDirection pseudo_threshold_direction = ThresholdDirection::kAtLeast;
  AnchorPool anchor_pool = AnchorPool::kNonTest;

  bool tsa_active() const { return tsa == TsaMode::kOn || (tsa == TsaMode::kAuto && enable_2nr); }
  SplitMode resolved_split_mode() const;
  SplitOptions split_options() const;
  GraphBuildOptions graph_options() const;
  OptimizerOptions optimizer_options() const;

  /// Throws ConfigError when a value is outside its documented range.
  void validate() const;

  /// Canonical key=value map (every key present).
  std::map<std::string, std::string> to_map() const;
  /// Applies the given keys over the current values. Unknown keys throw.
  void apply(const std::map<std::string, std::string>& kv);
  /// Stable 16-hex-digit hash of to_map().
  std::string hash() const;
};

/// Method presets. Each is a frozen bundle of graph mode and loss flags:
///
///   textgcn         with-word-word graph, supervised loss only
///   textgcn+2nr     with-word-word graph, + 2-NR (TSA on)
///   textgcn+pseudo  with-word-word graph, + pseudo-labeling
///   fewshot         doc-word graph, + 2-NR (TSA on) + pseudo-labeling
std::vector<std::string> preset_names();
void apply_preset(const std::string& name, TrainConfig* config);

/// Flat "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

}  // namespace fsgcn

#endif  // FSGCN_CONFIG_H_
