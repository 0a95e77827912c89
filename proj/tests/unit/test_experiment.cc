#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fsgcn/experiment.h"

using namespace fsgcn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fsgcn_exp_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string toy_corpus() { return std::string(FSGCN_TEST_DATA_DIR) + "/toy.jsonl"; }

TrainConfig small_config() {
  TrainConfig c;
  c.corpus = toy_corpus();
  c.min_freq = 1;
  c.epochs = 15;
  c.hidden = 8;
  c.fraction = 0.34;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config text parsing") {
  const auto kv = parse_config_text("# comment\nepochs = 20\n\nlr=0.5   # trailing\n  preset = fewshot \n");
  CHECK(kv.size() == 3);
  CHECK(kv.at("epochs") == "20");
  CHECK(kv.at("lr") == "0.5");
  CHECK(kv.at("preset") == "fewshot");
  CHECK_THROWS_AS(parse_config_text("no equals sign"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(" = 3"), ConfigError);
  CHECK_THROWS_AS(read_config_file("/nonexistent/cfg"), ConfigError);
}

TEST_CASE("explicit keys override the preset") {
  TrainConfig c;
  c.apply({{"preset", "fewshot"}, {"enable_pseudo", "false"}, {"graph_mode", "with-word-word"}});
  CHECK(c.enable_2nr);
  CHECK_FALSE(c.enable_pseudo);
  CHECK(c.graph_mode == GraphMode::kWithWordWord);
  CHECK(c.tsa_active());

  TrainConfig d;
  d.apply({{"preset", "textgcn"}});
  CHECK(d.graph_mode == GraphMode::kWithWordWord);
  CHECK_FALSE(d.enable_2nr);
  CHECK_FALSE(d.enable_pseudo);
  CHECK_FALSE(d.tsa_active());

  CHECK_THROWS_AS(c.apply({{"no_such_key", "1"}}), ConfigError);
  CHECK_THROWS_AS(c.apply({{"epochs", "ten"}}), ConfigError);
  CHECK_THROWS_AS(c.apply({{"preset", "gcn"}}), ConfigError);
}

TEST_CASE("presets") {
  const std::vector<std::string> expected = {"textgcn", "textgcn+2nr", "textgcn+pseudo", "fewshot"};
  CHECK(preset_names() == expected);
  struct Row {
    const char* name;
    GraphMode mode;
    bool nr, pseudo;
  };
  for (const Row& r : {Row{"textgcn", GraphMode::kWithWordWord, false, false},
                       Row{"textgcn+2nr", GraphMode::kWithWordWord, true, false},
                       Row{"textgcn+pseudo", GraphMode::kWithWordWord, false, true},
                       Row{"fewshot", GraphMode::kDocWordOnly, true, true}}) {
    TrainConfig c;
    apply_preset(r.name, &c);
    CAPTURE(r.name);
    CHECK(c.graph_mode == r.mode);
    CHECK(c.enable_2nr == r.nr);
    CHECK(c.enable_pseudo == r.pseudo);
    CHECK(c.tsa_active() == r.nr);
  }
}

TEST_CASE("config hash") {
  TrainConfig a, b;
  CHECK(a.hash() == b.hash());
  CHECK(a.hash().size() == 16);
  CHECK(a.hash().find_first_not_of("0123456789abcdef") == std::string::npos);
  b.seed = 2;
  CHECK(a.hash() != b.hash());
  // Round trip through the canonical map preserves the hash.
  TrainConfig c;
  c.apply(b.to_map());
  CHECK(c.hash() == b.hash());
  CHECK(c.to_map() == b.to_map());
}

TEST_CASE("config validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = [](auto mutate) {
    TrainConfig t;
    mutate(t);
    CHECK_THROWS_AS(t.validate(), ConfigError);
  };
  bad([](TrainConfig& t) { t.fraction = 0.0; });
  bad([](TrainConfig& t) { t.fraction = 1.5; });
  bad([](TrainConfig& t) { t.epochs = 0; });
  bad([](TrainConfig& t) { t.dropout = 1.0; });
  bad([](TrainConfig& t) { t.beta = 1.1; });
  bad([](TrainConfig& t) { t.window = 0; });
  bad([](TrainConfig& t) { t.format = "xml"; });
  bad([](TrainConfig& t) { t.budget_train = -1; });
}

TEST_CASE("run outputs and caching") {
  const auto dir = scratch("run");
  ExperimentOptions o;
  o.out_dir = dir.string();
  const auto cfg = small_config();

  const auto first = run_experiment(cfg, o);
  CHECK_FALSE(first.cached);
  CHECK(first.run_dir == run_directory(o.out_dir, cfg));
  CHECK(fs::exists(fs::path(first.run_dir) / "run.json"));
  CHECK(fs::exists(fs::path(first.run_dir) / "checkpoint.bin"));
  const auto trace = slurp(fs::path(first.run_dir) / "trace.csv");
  CHECK(std::count(trace.begin(), trace.end(), '\n') == cfg.epochs + 1);

  const auto second = run_experiment(cfg, o);
  CHECK(second.cached);
  CHECK(second.result.trace == first.result.trace);
  CHECK(second.result.best_epoch == first.result.best_epoch);
  CHECK(second.result.best_val_loss == first.result.best_val_loss);
  CHECK(second.result.test_accuracy == first.result.test_accuracy);
  CHECK(second.result.config_hash == cfg.hash());

  o.force = true;
  const auto third = run_experiment(cfg, o);
  CHECK_FALSE(third.cached);
  CHECK(third.result.trace == first.result.trace);
}

TEST_CASE("run json round trip keeps NaN") {
  RunResult r;
  r.best_epoch = 3;
  r.best_val_loss = 0.125;
  r.test_accuracy = std::nan("");
  r.trace.push_back({1, 0.5, 0.25, 0.125, 0.875, 0.75, 0.5, 0.5, 2, 7, 1});
  r.config_hash = "abc";
  const auto back = run_from_json(run_to_json(TrainConfig{}, r));
  CHECK(std::isnan(back.test_accuracy));
  CHECK(back.trace == r.trace);
  CHECK(back.best_epoch == 3);
  CHECK(back.best_val_loss == 0.125);
}

TEST_CASE("errors name their stage") {
  const auto dir = scratch("stage");
  ExperimentOptions o;
  o.out_dir = dir.string();
  auto cfg = small_config();
  cfg.corpus = (dir / "missing.jsonl").string();
  try {
    run_experiment(cfg, o);
    FAIL("expected an error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "load-corpus");
  }
  cfg = small_config();
  cfg.fraction = 2.0;
  try {
    run_experiment(cfg, o);
    FAIL("expected an error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "config");
  }
}

TEST_CASE("sweep grid arithmetic") {
  SweepSpec spec;
  spec.base = small_config();
  spec.fractions = {0.2, 0.4};
  spec.presets = {"textgcn", "fewshot"};
  const auto grid = enumerate_sweep(spec);
  CHECK(grid.size() == 2 * 2 * 5);
  std::set<std::string> hashes;
  std::set<std::pair<std::string, std::string>> cells;
  for (const auto& [cell, cfg] : grid) {
    hashes.insert(cell.config_hash);
    cells.insert({cell.setting, cell.preset});
    CHECK(cfg.hash() == cell.config_hash);
    CHECK(cfg.seed == cell.seed);
  }
  CHECK(hashes.size() == 20);
  CHECK(cells.size() == 4);

  spec.budgets = SweepSpec::budget_grid(100, 10);
  CHECK(enumerate_sweep(spec).size() == (2 + 9) * 2 * 5);

  spec.presets = {"gcn"};
  CHECK_THROWS_AS(enumerate_sweep(spec), ConfigError);
  spec.presets = {"textgcn"};
  spec.seeds.clear();
  CHECK_THROWS_AS(enumerate_sweep(spec), ConfigError);
}

TEST_CASE("budget grid") {
  const auto g = SweepSpec::budget_grid(100, 10);
  REQUIRE(g.size() == 9);
  for (size_t i = 0; i < g.size(); ++i) {
    CHECK(g[i].train == 10 * static_cast<int64_t>(i + 1));
    CHECK(g[i].train + g[i].validation == 100);
  }
  CHECK_THROWS(SweepSpec::budget_grid(10, 10));
  CHECK_THROWS(SweepSpec::budget_grid(0, 1));
}

TEST_CASE("aggregation matches a direct computation") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> acc(0.0, 1.0);
  std::vector<SweepCell> cells;
  std::map<std::pair<std::string, std::string>, std::vector<double>> expected;
  for (const char* setting : {"0.01", "0.05"})
    for (const char* preset : {"textgcn", "fewshot"})
      for (int seed = 1; seed <= 5; ++seed) {
        SweepCell c;
        c.setting = setting;
        c.preset = preset;
        c.seed = seed;
        c.ok = !(seed == 3 && std::string(preset) == "fewshot");
        c.result.test_accuracy = acc(gen);
        if (c.ok) expected[{setting, preset}].push_back(100.0 * c.result.test_accuracy);
        cells.push_back(c);
      }
  const auto agg = aggregate(cells);
  REQUIRE(agg.size() == 4);
  for (const auto& a : agg) {
    const auto& v = expected.at({a.setting, a.preset});
    // Welford's update as an independent reference.
    double mean = 0.0, m2 = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
      const double delta = v[i] - mean;
      mean += delta / static_cast<double>(i + 1);
      m2 += delta * (v[i] - mean);
    }
    CHECK(a.runs == static_cast<int64_t>(v.size()));
    CHECK(a.failed == (a.preset == "fewshot" ? 1 : 0));
    CHECK(a.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(a.std == doctest::Approx(std::sqrt(m2 / static_cast<double>(v.size() - 1))).epsilon(1e-12));
  }
  const auto table = format_table(agg);
  CHECK(table.find("textgcn") != std::string::npos);
  CHECK(table.find("±") != std::string::npos);

  SweepCell lone;
  lone.setting = "x";
  lone.preset = "textgcn";
  lone.ok = true;
  lone.result.test_accuracy = 0.5;
  const auto one = aggregate({lone});
  CHECK(one[0].mean == 50.0);
  CHECK(one[0].std == 0.0);
}

TEST_CASE("sweep writes its files and reuses finished runs") {
  const auto dir = scratch("sweep");
  SweepSpec spec;
  spec.base = small_config();
  spec.fractions = {0.34};
  spec.seeds = {1, 2};
  spec.presets = {"textgcn", "fewshot"};
  SweepOptions o;
  o.out_dir = dir.string();
  o.jobs = 2;
  const auto summary = run_sweep(spec, o);
  CHECK(summary.cells.size() == 4);
  for (const auto& c : summary.cells) {
    CHECK(c.ok);
    CHECK_FALSE(c.cached);
  }
  CHECK(summary.aggregates.size() == 2);
  REQUIRE(summary.edges.size() == 2);
  int64_t doc_word = 0, word_word = 0;
  for (const auto& e : summary.edges) (e.graph_mode == "doc-word" ? doc_word : word_word) = e.off_diagonal_nnz;
  CHECK(doc_word <= word_word);
  for (const char* f : {"sweep.csv", "aggregate.csv", "table.md", "edges.csv"})
    CHECK(fs::exists(dir / "results" / f));
  const auto csv = slurp(dir / "results" / "sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  const auto again = run_sweep(spec, o);
  for (size_t i = 0; i < again.cells.size(); ++i) {
    CHECK(again.cells[i].cached);
    CHECK(again.cells[i].result.test_accuracy == summary.cells[i].result.test_accuracy);
  }
}

TEST_CASE("failed cells are recorded and skipped") {
  const auto dir = scratch("sweep_fail");
  SweepSpec spec;
  spec.base = small_config();
  spec.base.corpus = (dir / "missing.jsonl").string();
  spec.fractions = {0.34};
  spec.seeds = {1};
  spec.presets = {"textgcn"};
  SweepOptions o;
  o.out_dir = dir.string();
  const auto summary = run_sweep(spec, o);
  REQUIRE(summary.cells.size() == 1);
  CHECK_FALSE(summary.cells[0].ok);
  CHECK(summary.cells[0].error.find("load-corpus") != std::string::npos);
  CHECK(summary.aggregates[0].failed == 1);
  CHECK(summary.aggregates[0].runs == 0);
}
