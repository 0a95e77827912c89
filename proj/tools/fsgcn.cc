/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn.cc
 * \brief Command-line front-end: build-graph, train, evaluate, sweep,
 *        export-embeddings.
 */
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fsgcn/experiment.h"
#include "fsgcn/simd/kernels.h"

namespace {

using fsgcn::TrainConfig;
namespace fs = std::filesystem;

constexpr int kUsageError = 2;
constexpr int kRunError = 1;

struct Globals {
  std::string config_file;
  int64_t seed = -1;
  int64_t jobs = 1;
  std::string out_dir = ".";
  std::string isa;
};

// One --flag per config key, dashes for underscores. Only given flags land in
// the map so file values survive.
class ConfigFlags {
 public:
  void attach(CLI::App* app, const std::vector<std::string>& skip = {}) {
    auto keys = TrainConfig().to_map();
    keys["preset"] = "";
    for (const auto& [key, unused] : keys) {
      if (key == "seed" || std::find(skip.begin(), skip.end(), key) != skip.end()) continue;
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      const std::string names = key == "graph_mode" ? flag + ",--mode" : flag;
      app->add_option(names, values_[key], "config key '" + key + "'");
    }
    app->add_option("--set", sets_, "extra key=value overrides");
  }

  TrainConfig resolve(const Globals& g, CLI::App* app) const {
    TrainConfig c;
    if (!g.config_file.empty()) c.apply(fsgcn::read_config_file(g.config_file));
    std::map<std::string, std::string> kv;
    for (const auto& [key, value] : values_) {
      std::string flag = "--" + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (app->count(flag) > 0) kv[key] = value;
    }
    for (const auto& s : sets_) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw fsgcn::ConfigError("--set expects key=value, got '" + s + "'");
      kv[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (g.seed >= 0) kv["seed"] = std::to_string(g.seed);
    c.apply(kv);
    c.validate();
    return c;
  }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> sets_;
};

std::string percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << 100.0 * v;
  return os.str();
}

struct LoadedRun {
  TrainConfig config;
  fsgcn::TokenizedCorpus corpus;
  fsgcn::BuiltGraph built;
  fsgcn::SplitAssignment splits;
  fsgcn::Checkpoint checkpoint;
};

LoadedRun load_run(const std::string& run_dir) {
  LoadedRun run;
  const fs::path dir(run_dir);
  std::ifstream in(dir / "run.json");
  if (!in) throw std::runtime_error("no run.json in " + run_dir);
  const auto j = nlohmann::json::parse(in);
  run.config.apply(j.at("config").get<std::map<std::string, std::string>>());
  run.corpus = fsgcn::load_config_corpus(run.config);
  run.built = fsgcn::build_graph(run.corpus, run.config.graph_options());
  run.splits = fsgcn::assign_splits(run.corpus, run.config.split_options());
  run.checkpoint = fsgcn::load_checkpoint((dir / "checkpoint.bin").string());
  return run;
}

std::vector<uint64_t> seed_list(const std::vector<int64_t>& seeds, int64_t n_seeds) {
  std::vector<uint64_t> out;
  if (!seeds.empty()) {
    for (int64_t s : seeds) {
      if (s < 0) throw fsgcn::ConfigError("seeds must be non-negative");
      out.push_back(static_cast<uint64_t>(s));
    }
    return out;
  }
  for (int64_t s = 1; s <= n_seeds; ++s) out.push_back(static_cast<uint64_t>(s));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Few-shot text classification with graph convolutional networks"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_file, "flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "master seed")->check(CLI::NonNegativeNumber);
  app.add_option("--jobs", g.jobs, "parallel runs for sweep")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "directory holding results/");
  app.add_option("--isa", g.isa, "kernel set: scalar, avx2, neon (default: best available)");

  // build-graph
  auto* build = app.add_subcommand("build-graph", "build the word-document graph and report its size");
  ConfigFlags build_flags;
  build_flags.attach(build);
  std::string graph_out;
  build->add_option("-o,--output", graph_out, "write the graph artifact here");

  // train
  auto* train = app.add_subcommand("train", "train one configuration and evaluate on the test split");
  ConfigFlags train_flags;
  train_flags.attach(train);
  bool force = false;
  std::string embeddings;
  int64_t log_every = 100;
  train->add_flag("--force", force, "ignore a cached result");
  train->add_option("--embeddings", embeddings, "also export embeddings to this CSV");
  train->add_option("--log-every", log_every, "progress line interval in epochs (0: quiet)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a stored checkpoint on a split");
  std::string eval_dir, eval_split = "test";
  evaluate->add_option("--run-dir", eval_dir, "results/<hash> directory")->required();
  evaluate->add_option("--split", eval_split, "train, validation or test")
      ->check(CLI::IsMember({"train", "validation", "test", "unlabeled"}));

  // export-embeddings
  auto* exporter = app.add_subcommand("export-embeddings", "write evaluation-mode node embeddings as CSV");
  std::string export_dir, export_path;
  exporter->add_option("--run-dir", export_dir, "results/<hash> directory")->required();
  exporter->add_option("-o,--output", export_path, "CSV path")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run the fraction x seed x preset grid and aggregate");
  ConfigFlags sweep_flags;
  sweep_flags.attach(sweep, {"fraction", "preset", "budget_train", "budget_val"});
  std::vector<double> fractions;
  std::vector<int64_t> seeds;
  int64_t n_seeds = 5;
  std::vector<std::string> presets;
  int64_t budget_total = 0, budget_step = 10;
  bool sweep_force = false;
  sweep->add_option("--fractions", fractions, "train fractions")->delimiter(',');
  sweep->add_option("--seeds", seeds, "explicit seed list")->delimiter(',');
  sweep->add_option("--n-seeds", n_seeds, "seeds 1..n when --seeds is absent")->check(CLI::PositiveNumber);
  sweep->add_option("--presets", presets, "presets (default: all)")->delimiter(',');
  sweep->add_option("--budget-total", budget_total, "label budget for the train/validation grid (0: off)");
  sweep->add_option("--budget-step", budget_step, "budget grid step");
  sweep->add_flag("--force", sweep_force, "rerun cells with cached results");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (!g.isa.empty()) {
    try {
      fsgcn::simd::set_active_isa(fsgcn::simd::parse_isa(g.isa));
    } catch (const std::exception& e) {
      std::cerr << "usage error: " << e.what() << "\n";
      return kUsageError;
    }
  }

  TrainConfig config;
  try {
    if (*build) config = build_flags.resolve(g, build);
    if (*train) config = train_flags.resolve(g, train);
    if (*sweep) config = sweep_flags.resolve(g, sweep);
  } catch (const fsgcn::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (*build) {
      const auto corpus = fsgcn::load_config_corpus(config);
      const auto built = fsgcn::build_graph(corpus, config.graph_options());
      const auto& ix = built.graph.indexing;
      std::cout << "graph_mode " << fsgcn::graph_mode_name(config.graph_mode) << "\n"
                << "documents " << ix.n_docs << "\n"
                << "words " << ix.n_words << "\n"
                << "nnz " << built.graph.adjacency.nnz() << "\n"
                << "off_diagonal_nnz " << built.graph.off_diagonal_nnz() << "\n";
      if (!graph_out.empty()) {
        fsgcn::GraphArtifact artifact{built.graph, {}, built.vocab.words};
        for (const auto& d : corpus.docs) artifact.doc_ids.push_back(d.id);
        fsgcn::save_graph(graph_out, artifact);
        std::cout << "wrote " << graph_out << "\n";
      }
      return 0;
    }

    if (*train) {
      fsgcn::ExperimentOptions opts;
      opts.out_dir = g.out_dir;
      opts.force = force;
      opts.embeddings_path = embeddings;
      opts.log = &std::cerr;
      opts.log_every = log_every;
      const auto rec = fsgcn::run_experiment(config, opts);
      std::cout << "run_dir " << rec.run_dir << (rec.cached ? " (cached)" : "") << "\n"
                << "best_epoch " << rec.result.best_epoch << "\n"
                << "best_val_loss " << rec.result.best_val_loss << "\n"
                << "test_accuracy " << percent(rec.result.test_accuracy) << "\n";
      return 0;
    }

    if (*evaluate) {
      const auto run = load_run(eval_dir);
      const fsgcn::TrainingData data{run.corpus, run.built.graph, run.splits};
      fsgcn::SplitTag tag = fsgcn::SplitTag::kTest;
      if (eval_split == "train") tag = fsgcn::SplitTag::kTrain;
      if (eval_split == "validation") tag = fsgcn::SplitTag::kValidation;
      if (eval_split == "unlabeled") tag = fsgcn::SplitTag::kUnlabeled;
      const double accuracy = fsgcn::evaluate(run.checkpoint, data, tag);
      std::cout << eval_split << "_accuracy " << percent(accuracy) << "\n";
      return 0;
    }

    if (*exporter) {
      const auto run = load_run(export_dir);
      const fsgcn::TrainingData data{run.corpus, run.built.graph, run.splits};
      fsgcn::export_embeddings(run.checkpoint, data, run.built.vocab.words, export_path);
      std::cout << "wrote " << export_path << "\n";
      return 0;
    }

    if (*sweep) {
      fsgcn::SweepSpec spec;
      try {
        spec.base = config;
        spec.fractions = fractions;
        spec.seeds = seed_list(seeds, n_seeds);
        if (!presets.empty()) spec.presets = presets;
        if (budget_total > 0) spec.budgets = fsgcn::SweepSpec::budget_grid(budget_total, budget_step);
        spec.validate();
      } catch (const fsgcn::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
      }
      fsgcn::SweepOptions opts;
      opts.out_dir = g.out_dir;
      opts.force = sweep_force;
      opts.jobs = g.jobs;
      opts.log = &std::cerr;
      const auto summary = fsgcn::run_sweep(spec, opts);
      std::cout << fsgcn::format_table(summary.aggregates);
      for (const auto& e : summary.edges)
        std::cout << "edges " << e.graph_mode << " nnz " << e.nnz << " off_diagonal " << e.off_diagonal_nnz << "\n";
      const bool any_failed =
          std::any_of(summary.cells.begin(), summary.cells.end(), [](const fsgcn::SweepCell& c) { return !c.ok; });
      return any_failed ? kRunError : 0;
    }
  } catch (const fsgcn::StageError& e) {
    std::cerr << "error in " << e.what() << "\n";
    return kRunError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunError;
  }
  return 0;
}
