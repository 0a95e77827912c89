/*!
 *  Copyright (c) 2026 by Contributors
 * \file experiment.cc
 */
#include "fsgcn/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

namespace fsgcn {

namespace fs = std::filesystem;

namespace {

template <class F>
auto staged(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

std::string corpus_key(const TrainConfig& c) { return c.format + "\n" + c.corpus + "\n" + c.test_corpus; }

std::string graph_key(const TrainConfig& c) {
  std::ostringstream os;
  os << corpus_key(c) << "\n" << graph_mode_name(c.graph_mode) << " " << c.window << " " << c.min_freq << " "
     << static_cast<int>(c.pmi_counting);
  return os.str();
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double number_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string fmt_fraction(double f) {
  std::ostringstream os;
  os << f;
  return os.str();
}

std::string percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << v;
  return os.str();
}

}  // namespace

TokenizedCorpus load_config_corpus(const TrainConfig& config) {
  if (config.corpus.empty()) throw ConfigError("no corpus given");
  const CorpusFormat format = parse_corpus_format(config.format);
  if (!config.test_corpus.empty()) return load_corpus_pair(config.corpus, config.test_corpus, format);
  return load_corpus(config.corpus, format);
}

std::shared_ptr<const TokenizedCorpus> DataCache::corpus(const TrainConfig& config) {
  const std::string key = corpus_key(config);
  {
    std::lock_guard lock(mu_);
    if (auto it = corpora_.find(key); it != corpora_.end()) return it->second;
  }
  auto loaded = std::make_shared<const TokenizedCorpus>(load_config_corpus(config));
  std::lock_guard lock(mu_);
  return corpora_.emplace(key, loaded).first->second;
}

std::shared_ptr<const BuiltGraph> DataCache::graph(const TrainConfig& config) {
  const std::string key = graph_key(config);
  {
    std::lock_guard lock(mu_);
    if (auto it = graphs_.find(key); it != graphs_.end()) return it->second;
  }
  auto c = corpus(config);
  auto built = std::make_shared<const BuiltGraph>(build_graph(*c, config.graph_options()));
  std::lock_guard lock(mu_);
  return graphs_.emplace(key, built).first->second;
}

nlohmann::json run_to_json(const TrainConfig& config, const RunResult& r) {
  nlohmann::json j;
  j["config_hash"] = r.config_hash;
  j["config"] = config.to_map();
  j["seed"] = r.seed;
  j["best_epoch"] = r.best_epoch;
  j["best_val_loss"] = number_or_null(r.best_val_loss);
  j["test_accuracy"] = number_or_null(r.test_accuracy);
  j["wall_seconds"] = r.wall_seconds;
  j["splits"] = {{"train", r.n_train}, {"validation", r.n_validation}, {"unlabeled", r.n_unlabeled}, {"test", r.n_test}};
  j["graph"] = {{"nodes", r.n_nodes}, {"nnz", r.n_edges}};
  auto& trace = j["trace"];
  trace = nlohmann::json::array();
  for (const auto& e : r.trace) {
    trace.push_back({{"epoch", e.epoch},
                     {"supervised", e.supervised},
                     {"l2nr", e.l2nr},
                     {"pseudo", e.pseudo},
                     {"total", e.total},
                     {"val_loss", e.val_loss},
                     {"val_accuracy", e.val_accuracy},
                     {"tsa_threshold", e.tsa_threshold},
                     {"tsa_masked", e.tsa_masked},
                     {"triplets", e.triplets},
                     {"pseudo_labeled", e.pseudo_labeled}});
  }
  return j;
}

RunResult run_from_json(const nlohmann::json& j) {
  RunResult r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.seed = j.at("seed").get<uint64_t>();
  r.best_epoch = j.at("best_epoch").get<int64_t>();
  r.best_val_loss = number_from(j.at("best_val_loss"));
  r.test_accuracy = number_from(j.at("test_accuracy"));
  r.wall_seconds = j.at("wall_seconds").get<double>();
  const auto& s = j.at("splits");
  r.n_train = s.at("train");
  r.n_validation = s.at("validation");
  r.n_unlabeled = s.at("unlabeled");
  r.n_test = s.at("test");
  r.n_nodes = j.at("graph").at("nodes");
  r.n_edges = j.at("graph").at("nnz");
  for (const auto& e : j.at("trace")) {
    EpochRecord rec;
    rec.epoch = e.at("epoch");
    rec.supervised = e.at("supervised");
    rec.l2nr = e.at("l2nr");
    rec.pseudo = e.at("pseudo");
    rec.total = e.at("total");
    rec.val_loss = e.at("val_loss");
    rec.val_accuracy = e.at("val_accuracy");
    rec.tsa_threshold = e.at("tsa_threshold");
    rec.tsa_masked = e.at("tsa_masked");
    rec.triplets = e.at("triplets");
    rec.pseudo_labeled = e.at("pseudo_labeled");
    r.trace.push_back(rec);
  }
  return r;
}

void write_trace_csv(const std::string& path, const std::vector<EpochRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << std::setprecision(17);
  out << "epoch,supervised,l2nr,pseudo,total,val_loss,val_accuracy,tsa_threshold,tsa_masked,triplets,pseudo_labeled\n";
  for (const auto& e : trace) {
    out << e.epoch << "," << e.supervised << "," << e.l2nr << "," << e.pseudo << "," << e.total << "," << e.val_loss
        << "," << e.val_accuracy << "," << e.tsa_threshold << "," << e.tsa_masked << "," << e.triplets << ","
        << e.pseudo_labeled << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string run_directory(const std::string& out_dir, const TrainConfig& config) {
  return (fs::path(out_dir) / "results" / config.hash()).string();
}

ExperimentRecord run_experiment(const TrainConfig& config, const ExperimentOptions& options, DataCache* cache) {
  staged("config", [&] { config.validate(); });
  ExperimentRecord rec;
  rec.run_dir = run_directory(options.out_dir, config);
  const fs::path dir(rec.run_dir);
  const fs::path json_path = dir / "run.json";

  if (!options.force && options.embeddings_path.empty() && fs::exists(json_path)) {
    rec.result = staged("read-results", [&] {
      std::ifstream in(json_path);
      return run_from_json(nlohmann::json::parse(in));
    });
    rec.cached = true;
    return rec;
  }

  DataCache local;
  DataCache& data_cache = cache ? *cache : local;
  auto corpus = staged("load-corpus", [&] { return data_cache.corpus(config); });
  auto built = staged("build-graph", [&] { return data_cache.graph(config); });
  const SplitAssignment splits = staged("split", [&] { return assign_splits(*corpus, config.split_options()); });
  const TrainingData data{*corpus, built->graph, splits};
  TrainOutcome outcome = staged("train", [&] { return train(data, config, options.log, options.log_every); });

  staged("write-results", [&] {
    fs::create_directories(dir);
    write_text(dir / "run.json", run_to_json(config, outcome.result).dump(2) + "\n");
    write_trace_csv((dir / "trace.csv").string(), outcome.result.trace);
    if (options.save_checkpoint) save_checkpoint((dir / "checkpoint.bin").string(), outcome.best);
    if (!options.embeddings_path.empty())
      export_embeddings(outcome.best, data, built->vocab.words, options.embeddings_path);
  });
  rec.result = std::move(outcome.result);
  return rec;
}

std::vector<BudgetSetting> SweepSpec::budget_grid(int64_t total, int64_t step) {
  if (total <= 0 || step <= 0 || step >= total) throw ConfigError("budget grid needs 0 < step < total");
  std::vector<BudgetSetting> out;
  for (int64_t t = step; t < total; t += step) out.push_back({t, total - t});
  return out;
}

void SweepSpec::validate() const {
  base.validate();
  if (fractions.empty() && budgets.empty()) throw ConfigError("sweep: no fractions or budgets");
  if (seeds.empty()) throw ConfigError("sweep: no seeds");
  if (presets.empty()) throw ConfigError("sweep: no presets");
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("sweep: fraction must lie in (0, 1], got " + fmt_fraction(f));
  for (const auto& b : budgets)
    if (b.train <= 0 || b.validation <= 0) throw ConfigError("sweep: budgets must be positive");
  const auto names = preset_names();
  for (const auto& p : presets)
    if (std::find(names.begin(), names.end(), p) == names.end()) throw ConfigError("sweep: unknown preset '" + p + "'");
}

std::vector<std::pair<SweepCell, TrainConfig>> enumerate_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<std::pair<SweepCell, TrainConfig>> out;
  auto add = [&](const std::string& setting, double fraction, BudgetSetting budget) {
    for (const auto& preset : spec.presets) {
      for (uint64_t seed : spec.seeds) {
        TrainConfig c = spec.base;
        apply_preset(preset, &c);
        c.seed = seed;
        c.fraction = fraction;
        c.budget_train = budget.train;
        c.budget_val = budget.validation;
        SweepCell cell;
        cell.preset = preset;
        cell.setting = setting;
        cell.fraction = fraction;
        cell.budget = budget;
        cell.seed = seed;
        cell.config_hash = c.hash();
        out.emplace_back(std::move(cell), std::move(c));
      }
    }
  };
  for (double f : spec.fractions) add(fmt_fraction(f), f, {});
  for (const auto& b : spec.budgets)
    add("budget " + std::to_string(b.train) + "/" + std::to_string(b.validation), spec.base.fraction, b);
  return out;
}

std::vector<AggregateCell> aggregate(const std::vector<SweepCell>& cells) {
  std::vector<AggregateCell> out;
  std::map<std::pair<std::string, std::string>, size_t> index;
  std::vector<std::vector<double>> values;
  for (const auto& cell : cells) {
    const auto key = std::make_pair(cell.setting, cell.preset);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({cell.setting, cell.preset});
      values.emplace_back();
    }
    AggregateCell& agg = out[it->second];
    if (cell.ok && std::isfinite(cell.result.test_accuracy)) {
      values[it->second].push_back(100.0 * cell.result.test_accuracy);
    } else {
      ++agg.failed;
    }
  }
  for (size_t i = 0; i < out.size(); ++i) {
    const auto& v = values[i];
    out[i].runs = static_cast<int64_t>(v.size());
    if (v.empty()) {
      out[i].mean = out[i].std = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double sum = 0.0;
    for (double x : v) sum += x;
    out[i].mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - out[i].mean) * (x - out[i].mean);
    out[i].std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  }
  return out;
}

std::string format_table(const std::vector<AggregateCell>& aggregates) {
  std::vector<std::string> settings, presets;
  std::map<std::pair<std::string, std::string>, const AggregateCell*> at;
  for (const auto& a : aggregates) {
    if (std::find(settings.begin(), settings.end(), a.setting) == settings.end()) settings.push_back(a.setting);
    if (std::find(presets.begin(), presets.end(), a.preset) == presets.end()) presets.push_back(a.preset);
    at[{a.setting, a.preset}] = &a;
  }
  std::ostringstream os;
  os << "| setting |";
  for (const auto& p : presets) os << " " << p << " |";
  os << "\n|---|";
  for (size_t i = 0; i < presets.size(); ++i) os << "---|";
  os << "\n";
  for (const auto& s : settings) {
    os << "| " << s << " |";
    for (const auto& p : presets) {
      auto it = at.find({s, p});
      if (it == at.end() || it->second->runs == 0) {
        os << " - |";
        continue;
      }
      os << " " << percent(it->second->mean) << " ± " << percent(it->second->std);
      if (it->second->failed > 0) os << " (" << it->second->failed << " failed)";
      os << " |";
    }
    os << "\n";
  }
  return os.str();
}

SweepSummary run_sweep(const SweepSpec& spec, const SweepOptions& options) {
  auto grid = enumerate_sweep(spec);
  SweepSummary summary;
  summary.cells.resize(grid.size());
  DataCache cache;
  std::mutex log_mu;
  std::atomic<size_t> next{0};

  auto worker = [&] {
    for (size_t i = next++; i < grid.size(); i = next++) {
      SweepCell cell = grid[i].first;
      ExperimentOptions eo;
      eo.out_dir = options.out_dir;
      eo.force = options.force;
      try {
        ExperimentRecord rec = run_experiment(grid[i].second, eo, &cache);
        cell.ok = true;
        cell.cached = rec.cached;
        cell.result = std::move(rec.result);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      if (options.log) {
        std::lock_guard lock(log_mu);
        *options.log << "[" << (i + 1) << "/" << grid.size() << "] " << cell.setting << " " << cell.preset << " seed "
                     << cell.seed << ": ";
        if (cell.ok)
          *options.log << percent(100.0 * cell.result.test_accuracy) << (cell.cached ? " (cached)" : "") << "\n";
        else
          *options.log << "FAILED " << cell.error << "\n";
      }
      summary.cells[i] = std::move(cell);
    }
  };
  const auto jobs = static_cast<size_t>(std::max<int64_t>(1, std::min<int64_t>(options.jobs, grid.size())));
  std::vector<std::jthread> threads;
  for (size_t t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  threads.clear();

  summary.aggregates = aggregate(summary.cells);
  const auto failed = std::count_if(summary.cells.begin(), summary.cells.end(), [](const SweepCell& c) { return !c.ok; });
  if (failed > 0 && options.log)
    *options.log << "warning: " << failed << " of " << summary.cells.size()
                 << " runs failed; aggregates cover completed runs only\n";

  std::set<GraphMode> modes;
  for (const auto& [cell, config] : grid) modes.insert(config.graph_mode);
  for (GraphMode mode : modes) {
    TrainConfig c = spec.base;
    c.graph_mode = mode;
    try {
      auto built = cache.graph(c);
      summary.edges.push_back({graph_mode_name(mode), built->graph.indexing.n_nodes(), built->graph.adjacency.nnz(),
                               built->graph.off_diagonal_nnz()});
    } catch (const std::exception& e) {
      if (options.log) *options.log << "warning: edge count for " << graph_mode_name(mode) << " failed: " << e.what() << "\n";
    }
  }

  staged("write-results", [&] {
    const fs::path dir = fs::path(options.out_dir) / "results";
    fs::create_directories(dir);
    std::ostringstream runs;
    runs << std::setprecision(17);
    runs << "setting,preset,fraction,budget_train,budget_val,seed,config_hash,status,test_accuracy,best_epoch,"
            "best_val_loss,error\n";
    for (const auto& c : summary.cells) {
      std::string err = c.error;
      std::replace(err.begin(), err.end(), '"', '\'');
      std::replace(err.begin(), err.end(), '\n', ' ');
      runs << c.setting << "," << c.preset << "," << c.fraction << "," << c.budget.train << "," << c.budget.validation
           << "," << c.seed << "," << c.config_hash << "," << (c.ok ? "ok" : "failed") << ",";
      if (c.ok) runs << c.result.test_accuracy << "," << c.result.best_epoch << "," << c.result.best_val_loss;
      else runs << ",,";
      runs << ",\"" << err << "\"\n";
    }
    write_text(dir / "sweep.csv", runs.str());

    std::ostringstream agg;
    agg << std::setprecision(17);
    agg << "setting,preset,runs,failed,mean_accuracy_pct,std_accuracy_pct,mean_display,std_display\n";
    for (const auto& a : summary.aggregates)
      agg << a.setting << "," << a.preset << "," << a.runs << "," << a.failed << "," << a.mean << "," << a.std << ","
          << percent(a.mean) << "," << percent(a.std) << "\n";
    write_text(dir / "aggregate.csv", agg.str());
    write_text(dir / "table.md", format_table(summary.aggregates));

    std::ostringstream edges;
    edges << "graph_mode,nodes,nnz,off_diagonal_nnz\n";
    for (const auto& e : summary.edges)
      edges << e.graph_mode << "," << e.n_nodes << "," << e.nnz << "," << e.off_diagonal_nnz << "\n";
    write_text(dir / "edges.csv", edges.str());
  });
  return summary;
}

}  // namespace fsgcn
