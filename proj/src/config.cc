/*!
 *  Copyright (c) 2026 by Contributors
 * \file config.cc
 */
#include "fsgcn/config.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fsgcn/rng.h"

namespace fsgcn {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

int64_t parse_int(const std::string& key, const std::string& v) {
  int64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class E>
E parse_enum(const std::string& key, const std::string& v, std::initializer_list<std::pair<const char*, E>> table) {
  for (const auto& [name, value] : table)
    if (v == name) return value;
  std::string options;
  for (const auto& [name, value] : table) options += std::string(options.empty() ? "" : ", ") + name;
  throw ConfigError("config: '" + key + "' must be one of {" + options + "}, got '" + v + "'");
}

}  // namespace

SplitMode TrainConfig::resolved_split_mode() const {
  switch (split_mode) {
    case SplitModeSetting::kLow: return SplitMode::kLowResource;
    case SplitModeSetting::kHigh: return SplitMode::kHighResource;
    case SplitModeSetting::kAuto: break;
  }
  // Equal-sized validation is impossible past half of the pool.
  return fraction > 0.5 ? SplitMode::kHighResource : SplitMode::kLowResource;
}

SplitOptions TrainConfig::split_options() const {
  SplitOptions o;
  o.train_fraction = fraction;
  o.seed = derive_stream(seed, "split").next_u64();
  o.mode = resolved_split_mode();
  o.stratified = stratified;
  if (budget_train > 0) o.budget_override = std::make_pair(budget_train, budget_val);
  return o;
}

GraphBuildOptions TrainConfig::graph_options() const {
  GraphBuildOptions o;
  o.mode = graph_mode;
  o.window_size = window;
  o.min_frequency = min_freq;
  o.pmi_counting = pmi_counting;
  return o;
}

OptimizerOptions TrainConfig::optimizer_options() const {
  OptimizerOptions o;
  o.kind = optimizer;
  o.lr = lr;
  o.lookahead_k = lookahead_k;
  o.lookahead_alpha = lookahead_alpha;
  o.gradient_centralization = gc;
  o.weight_decay = weight_decay;
  return o;
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  require(fraction > 0.0 && fraction <= 1.0, "fraction must lie in (0, 1], got " + fmt_double(fraction));
  require(budget_train >= 0 && budget_val >= 0, "budgets must be non-negative");
  require(window >= 1, "window must be >= 1");
  require(min_freq >= 1, "min_freq must be >= 1");
  require(epochs >= 1, "epochs must be >= 1");
  require(lr > 0.0, "lr must be positive");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  require(hidden >= 1, "hidden must be >= 1");
  require(lookahead_k >= 1, "lookahead_k must be >= 1");
  require(lookahead_alpha >= 0.0 && lookahead_alpha <= 1.0, "lookahead_alpha must lie in [0, 1]");
  require(weight_decay >= 0.0, "weight_decay must be non-negative");
  require(margin >= 0.0, "margin must be non-negative");
  require(lambda_2nr >= 0.0 && lambda_pseudo >= 0.0, "loss weights must be non-negative");
  require(beta >= 0.0 && beta <= 1.0, "beta must lie in [0, 1]");
  require(format == "jsonl" || format == "tsv", "format must be jsonl or tsv");
}

std::map<std::string, std::string> TrainConfig::to_map() const {
  std::map<std::string, std::string> m;
  m["corpus"] = corpus;
  m["test_corpus"] = test_corpus;
  m["format"] = format;
  m["graph_mode"] = graph_mode_name(graph_mode);
  m["window"] = std::to_string(window);
  m["min_freq"] = std::to_string(min_freq);
  m["pmi_counting"] = pmi_counting == PmiCounting::kPresence ? "presence" : "multiplicity";
  m["fraction"] = fmt_double(fraction);
  m["split_mode"] = split_mode == SplitModeSetting::kAuto ? "auto" : split_mode == SplitModeSetting::kLow ? "low" : "high";
  m["budget_train"] = std::to_string(budget_train);
  m["budget_val"] = std::to_string(budget_val);
  m["stratified"] = fmt_bool(stratified);
  m["seed"] = std::to_string(seed);
  m["epochs"] = std::to_string(epochs);
  m["lr"] = fmt_double(lr);
  m["dropout"] = fmt_double(dropout);
  m["hidden"] = std::to_string(hidden);
  m["optimizer"] = optimizer_kind_name(optimizer);
  m["lookahead_k"] = std::to_string(lookahead_k);
  m["lookahead_alpha"] = fmt_double(lookahead_alpha);
  m["gc"] = fmt_bool(gc);
  m["weight_decay"] = fmt_double(weight_decay);
  m["enable_2nr"] = fmt_bool(enable_2nr);
  m["enable_pseudo"] = fmt_bool(enable_pseudo);
  m["tsa"] = tsa == TsaMode::kAuto ? "auto" : tsa == TsaMode::kOn ? "on" : "off";
  m["margin"] = fmt_double(margin);
  m["distance"] = distance == DistanceKind::kEuclidean ? "euclidean" : "squared-euclidean";
  m["lambda_2nr"] = fmt_double(lambda_2nr);
  m["lambda_pseudo"] = fmt_double(lambda_pseudo);
  m["beta"] = fmt_double(beta);
  m["pseudo_threshold_direction"] =
      pseudo_threshold_direction == ThresholdDirection::kAtLeast ? "at-least" : "at-most";
  m["anchor_pool"] = anchor_pool == AnchorPool::kNonTest ? "non-test" : "all";
  return m;
}

void TrainConfig::apply(const std::map<std::string, std::string>& kv) {
  // A preset is a baseline; explicit keys in the same map override it.
  if (auto it = kv.find("preset"); it != kv.end()) apply_preset(it->second, this);
  for (const auto& [key, value] : kv) {
    if (key == "corpus") corpus = value;
    else if (key == "test_corpus") test_corpus = value;
    else if (key == "format") format = value;
    else if (key == "graph_mode") {
      try {
        graph_mode = parse_graph_mode(value);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
    else if (key == "window") window = parse_int(key, value);
    else if (key == "min_freq") min_freq = parse_int(key, value);
    else if (key == "pmi_counting")
      pmi_counting = parse_enum<PmiCounting>(key, value, {{"presence", PmiCounting::kPresence},
                                                          {"multiplicity", PmiCounting::kMultiplicity}});
    else if (key == "fraction") fraction = parse_double(key, value);
    else if (key == "split_mode")
      split_mode = parse_enum<SplitModeSetting>(
          key, value, {{"auto", SplitModeSetting::kAuto}, {"low", SplitModeSetting::kLow}, {"high", SplitModeSetting::kHigh}});
    else if (key == "budget_train") budget_train = parse_int(key, value);
    else if (key == "budget_val") budget_val = parse_int(key, value);
    else if (key == "stratified") stratified = parse_bool(key, value);
    else if (key == "seed") {
      const int64_t s = parse_int(key, value);
      if (s < 0) throw ConfigError("config: seed must be non-negative");
      seed = static_cast<uint64_t>(s);
    }
    else if (key == "epochs") epochs = parse_int(key, value);
    else if (key == "lr") lr = parse_double(key, value);
    else if (key == "dropout") dropout = parse_double(key, value);
    else if (key == "hidden") hidden = parse_int(key, value);
    else if (key == "optimizer")
      optimizer = parse_enum<OptimizerKind>(key, value, {{"ranger", OptimizerKind::kRanger}, {"adam", OptimizerKind::kAdam}});
    else if (key == "lookahead_k") lookahead_k = parse_int(key, value);
    else if (key == "lookahead_alpha") lookahead_alpha = parse_double(key, value);
    else if (key == "gc") gc = parse_bool(key, value);
    else if (key == "weight_decay") weight_decay = parse_double(key, value);
    else if (key == "enable_2nr") enable_2nr = parse_bool(key, value);
    else if (key == "enable_pseudo") enable_pseudo = parse_bool(key, value);
    else if (key == "tsa")
      tsa = parse_enum<TsaMode>(key, value, {{"auto", TsaMode::kAuto}, {"on", TsaMode::kOn}, {"off", TsaMode::kOff},
                                             {"true", TsaMode::kOn}, {"false", TsaMode::kOff}});
    else if (key == "margin") margin = parse_double(key, value);
    else if (key == "distance")
      distance = parse_enum<DistanceKind>(
          key, value, {{"euclidean", DistanceKind::kEuclidean}, {"squared-euclidean", DistanceKind::kSquaredEuclidean}});
    else if (key == "lambda_2nr") lambda_2nr = parse_double(key, value);
    else if (key == "lambda_pseudo") lambda_pseudo = parse_double(key, value);
    else if (key == "beta") beta = parse_double(key, value);
    else if (key == "pseudo_threshold_direction")
      pseudo_threshold_direction = parse_enum<ThresholdDirection>(
          key, value, {{"at-least", ThresholdDirection::kAtLeast}, {"at-most", ThresholdDirection::kAtMost}});
    else if (key == "anchor_pool")
      anchor_pool = parse_enum<AnchorPool>(key, value, {{"non-test", AnchorPool::kNonTest}, {"all", AnchorPool::kAll}});
    else if (key == "preset") continue;
    else
      throw ConfigError("config: unknown key '" + key + "'");
  }
}

std::string TrainConfig::hash() const {
  std::string canon;
  for (const auto& [k, v] : to_map()) canon += k + "=" + v + "\n";
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(canon)));
  return buf;
}

std::vector<std::string> preset_names() { return {"textgcn", "textgcn+2nr", "textgcn+pseudo", "fewshot"}; }

void apply_preset(const std::string& name, TrainConfig* c) {
  if (name == "textgcn") {
    c->graph_mode = GraphMode::kWithWordWord;
    c->enable_2nr = false;
    c->enable_pseudo = false;
  } else if (name == "textgcn+2nr") {
    c->graph_mode = GraphMode::kWithWordWord;
    c->enable_2nr = true;
    c->enable_pseudo = false;
  } else if (name == "textgcn+pseudo") {
    c->graph_mode = GraphMode::kWithWordWord;
    c->enable_2nr = false;
    c->enable_pseudo = true;
  } else if (name == "fewshot") {
    c->graph_mode = GraphMode::kDocWordOnly;
    c->enable_2nr = true;
    c->enable_pseudo = true;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected textgcn, textgcn+2nr, textgcn+pseudo or fewshot)");
  }
  c->tsa = TsaMode::kAuto;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace fsgcn
