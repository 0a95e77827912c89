#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "fsgcn/objectives.h"
#include "fsgcn/ops.h"
#include "oracles.h"

using namespace fsgcn;

namespace {

WordDocumentGraph doc_word_graph(int64_t docs, int64_t words, const std::vector<DocWordEdge>& edges) {
  return build_adjacency(edges, std::nullopt, NodeIndexing{docs, words});
}

SplitAssignment all_train(int64_t n) {
  SplitAssignment s;
  s.tags.assign(static_cast<size_t>(n), SplitTag::kTrain);
  return s;
}

DenseMatrix logits_from_probs(const std::vector<std::vector<double>>& probs) {
  DenseMatrix m(static_cast<int64_t>(probs.size()), static_cast<int64_t>(probs[0].size()));
  for (size_t r = 0; r < probs.size(); ++r)
    for (size_t c = 0; c < probs[r].size(); ++c) m(r, c) = std::log(probs[r][c]);
  return m;
}

}  // namespace

TEST_CASE("sampler forced outcomes") {
  SUBCASE("shared word with no outside document is skipped") {
    const auto g = doc_word_graph(2, 1, {{0, 0, 1.0}, {1, 0, 1.0}});
    Rng rng(1);
    const std::vector<int64_t> anchors = {0};
    const auto batch = sample_triplets(g, anchors, rng);
    CHECK(batch.triplets.empty());
    CHECK(batch.skipped_no_negative == 1);
  }
  SUBCASE("third document is the forced negative") {
    const auto g = doc_word_graph(3, 2, {{0, 0, 1.0}, {1, 0, 1.0}, {2, 1, 1.0}});
    Rng rng(2);
    const std::vector<int64_t> anchors(50, 0);
    const auto batch = sample_triplets(g, anchors, rng);
    REQUIRE(batch.triplets.size() == 50);
    std::set<int64_t> positives;
    for (const auto& t : batch.triplets) {
      CHECK(t.bridge == g.indexing.word_node(0));
      CHECK(t.negative == 2);
      positives.insert(t.positive);
    }
    CHECK(positives == std::set<int64_t>{0, 1});
  }
  SUBCASE("anchor without words is skipped") {
    const auto g = doc_word_graph(3, 1, {{0, 0, 1.0}});
    Rng rng(3);
    const std::vector<int64_t> anchors = {1, 0};
    const auto batch = sample_triplets(g, anchors, rng);
    CHECK(batch.skipped_no_words == 1);
    CHECK(batch.triplets.size() == 1);
  }
  SUBCASE("word anchors are rejected") {
    const auto g = doc_word_graph(2, 1, {{0, 0, 1.0}});
    Rng rng(4);
    const std::vector<int64_t> anchors = {2};
    CHECK_THROWS(sample_triplets(g, anchors, rng));
  }
}

TEST_CASE("bridge frequencies follow edge weights") {
  const auto g = doc_word_graph(3, 2, {{0, 0, 3.0}, {0, 1, 1.0}, {1, 0, 0.5}, {2, 1, 0.5}});
  Rng rng(5);
  const int64_t n = 100000;
  const std::vector<int64_t> anchors(n, 0);
  const auto batch = sample_triplets(g, anchors, rng);
  REQUIRE(static_cast<int64_t>(batch.triplets.size()) == n);
  int64_t first = 0;
  for (const auto& t : batch.triplets) first += t.bridge == g.indexing.word_node(0);
  const double sigma = std::sqrt(n * 0.75 * 0.25);
  CHECK(std::abs(static_cast<double>(first) - 0.75 * n) < 3.0 * sigma);
}

TEST_CASE("sampled triplets satisfy the membership invariants") {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = oracle::random_corpus(gen, 15, 12, 8);
    GraphBuildOptions o;
    o.min_frequency = 1;
    o.mode = trial % 2 ? GraphMode::kWithWordWord : GraphMode::kDocWordOnly;
    const auto built = build_graph(c, o);
    const auto& g = built.graph;
    std::vector<int64_t> anchors(static_cast<size_t>(g.indexing.n_docs));
    std::iota(anchors.begin(), anchors.end(), 0);
    Rng rng(gen());
    const auto batch = sample_triplets(g, anchors, rng);
    for (const auto& t : batch.triplets) {
      CHECK(g.indexing.is_word(t.bridge));
      CHECK(g.adjacency.at(t.anchor, t.bridge) > 0.0);
      CHECK(g.indexing.is_doc(t.positive));
      CHECK(g.adjacency.at(t.positive, t.bridge) > 0.0);
      CHECK(g.indexing.is_doc(t.negative));
      CHECK(g.adjacency.at(t.negative, t.bridge) == 0.0);
    }
  }
}

TEST_CASE("2-NR hinge arithmetic") {
  DenseMatrix z(3, 1);
  SUBCASE("satisfied margin") {
    z.data = {0.0, 0.0, 2.0};
    const std::vector<TripletSample> t = {{0, 9, 1, 2}};
    CHECK(loss_2nr(z, t, 1.0).loss == 0.0);
    CHECK(loss_2nr(z, t, 1.0).active == 0);
  }
  SUBCASE("violated margin") {
    z.data = {0.0, 1.0, 0.5};
    const std::vector<TripletSample> t = {{0, 9, 1, 2}};
    CHECK(loss_2nr(z, t, 1.0).loss == doctest::Approx(1.5));
  }
  SUBCASE("negative margin rejected") { CHECK_THROWS(loss_2nr(z, std::vector<TripletSample>{}, -1.0)); }
  SUBCASE("empty triplet list") { CHECK(loss_2nr(z, std::vector<TripletSample>{}, 1.0).loss == 0.0); }
}

TEST_CASE("2-NR gradient matches finite differences and touches only triplet rows") {
  std::mt19937_64 gen(7);
  for (DistanceKind kind : {DistanceKind::kEuclidean, DistanceKind::kSquaredEuclidean}) {
    for (int trial = 0; trial < 10; ++trial) {
      auto z = oracle::random_dense(gen, 12, 4);
      std::vector<TripletSample> t;
      std::uniform_int_distribution<int64_t> node(0, 8);
      for (int k = 0; k < 10; ++k) {
        int64_t a = node(gen), p = node(gen), n = node(gen);
        while (p == a) p = node(gen);
        while (n == a || n == p) n = node(gen);
        t.push_back({a, 11, p, n});
      }
      auto dist = [&](int64_t i, int64_t j) {
        return kind == DistanceKind::kEuclidean ? euclidean_distance(z.row(i), z.row(j))
                                                : squared_euclidean_distance(z.row(i), z.row(j));
      };
      bool near_hinge = false;
      for (const auto& s : t) near_hinge |= std::abs(dist(s.anchor, s.positive) - dist(s.anchor, s.negative) + 0.5) < 1e-3;
      if (near_hinge) continue;
      const auto res = loss_2nr(z, t, 0.5, kind);
      auto f = [&] { return loss_2nr(z, t, 0.5, kind).loss; };
      CHECK(oracle::max_relative_error(res.grad_z.data, oracle::numeric_gradient(f, z.data)) < 1e-4);
      for (int64_t r = 9; r < 12; ++r)
        for (double g : res.grad_z.row(r)) CHECK(g == 0.0);
    }
  }
}

TEST_CASE("2-NR descent and scale behavior") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto z = oracle::random_dense(gen, 3, 5);
    const std::vector<TripletSample> t = {{0, 9, 1, 2}};
    auto gap = [&](const DenseMatrix& m) {
      return euclidean_distance(m.row(0), m.row(1)) - euclidean_distance(m.row(0), m.row(2));
    };
    const auto res = loss_2nr(z, t, 10.0);
    REQUIRE(res.active == 1);
    auto stepped = z;
    for (size_t i = 0; i < z.size(); ++i) stepped.data[i] -= 1e-6 * res.grad_z.data[i];
    CHECK(gap(stepped) < gap(z));

    auto scaled = z;
    for (double& v : scaled.data) v *= 3.0;
    CHECK(gap(scaled) == doctest::Approx(3.0 * gap(z)).epsilon(1e-12));
  }
}

TEST_CASE("TSA threshold values") {
  const TsaSchedule s{1000, 4};
  CHECK(tsa_threshold(0, s) == 0.25);
  CHECK(tsa_threshold(1000, s) == doctest::Approx(0.75 * (1.0 - std::exp(-5.0)) + 0.25).epsilon(1e-15));
  CHECK(tsa_threshold(1000, s) == doctest::Approx(0.994947).epsilon(1e-6));
  CHECK(tsa_threshold(500, s) == doctest::Approx(0.938436).epsilon(1e-6));
  double prev = 0.0;
  for (int64_t t = 0; t <= 1000; ++t) {
    const double v = tsa_threshold(t, s);
    CHECK(v >= prev);
    CHECK(v <= 1.0);
    prev = v;
  }
  CHECK_THROWS(tsa_threshold(-1, s));
  CHECK_THROWS(tsa_threshold(1001, s));
}

TEST_CASE("supervised loss with TSA gate") {
  const auto splits = all_train(3);
  SUBCASE("confident example is masked") {
    const auto logits = logits_from_probs({{0.999, 0.001}});
    const std::vector<LabeledNode> l = {{0, 0}};
    const auto res = loss_supervised(logits, l, splits, 0.95, true);
    CHECK(res.masked == 1);
    CHECK(res.loss == 0.0);
    for (double g : res.grad_logits.data) CHECK(g == 0.0);
  }
  SUBCASE("gate off is plain mean CE") {
    const auto logits = logits_from_probs({{0.999, 0.001}, {0.3, 0.7}});
    const std::vector<LabeledNode> l = {{0, 0}, {1, 0}};
    const auto res = loss_supervised(logits, l, splits, 0.95, false);
    CHECK(res.loss == doctest::Approx((-std::log(0.999) - std::log(0.3)) / 2.0));
    CHECK(res.used == 2);
  }
  SUBCASE("chance-level probability is kept") {
    DenseMatrix logits(1, 4, 0.0);
    const std::vector<LabeledNode> l = {{0, 2}};
    const auto res = loss_supervised(logits, l, splits, 0.25, true);
    CHECK(res.masked == 0);
    CHECK(res.loss == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  }
  SUBCASE("leakage guard") {
    SplitAssignment mixed;
    mixed.tags = {SplitTag::kTrain, SplitTag::kValidation, SplitTag::kTest};
    DenseMatrix logits(3, 2);
    for (int64_t node : {1, 2}) {
      const std::vector<LabeledNode> l = {{node, 0}};
      CHECK_THROWS_AS(loss_supervised(logits, l, mixed, 1.0, false), std::logic_error);
    }
  }
}

TEST_CASE("pseudo-label selection") {
  const std::vector<int64_t> eligible = {0, 1};
  SUBCASE("confident kept, unsure dropped") {
    const auto logits = logits_from_probs({{0.8, 0.2}, {0.6, 0.4}});
    const auto b = select_pseudo_labels(logits, eligible, 0.75);
    REQUIRE(b.nodes.size() == 1);
    CHECK(b.nodes[0] == 0);
    CHECK(b.labels[0] == 0);
    const auto flipped = select_pseudo_labels(logits, eligible, 0.75, ThresholdDirection::kAtMost);
    REQUIRE(flipped.nodes.size() == 1);
    CHECK(flipped.nodes[0] == 1);
  }
  SUBCASE("shared pseudo-label halves the weight") {
    const auto logits = logits_from_probs({{0.1, 0.9}, {0.2, 0.8}});
    const auto res = loss_pseudo(logits, eligible, 0.75);
    CHECK(res.batch.weights == std::vector<double>{0.5, 0.5});
    CHECK(res.loss == doctest::Approx((-std::log(0.9) - std::log(0.8)) / 2.0));
  }
  SUBCASE("empty selection") {
    const auto logits = logits_from_probs({{0.5, 0.5}, {0.6, 0.4}});
    const auto res = loss_pseudo(logits, eligible, 0.75);
    CHECK(res.loss == 0.0);
    for (double g : res.grad_logits.data) CHECK(g == 0.0);
  }
}

TEST_CASE("pseudo-label gradient treats the labels as constants") {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 10; ++trial) {
    auto logits = oracle::random_dense(gen, 8, 3, 4.0);
    const std::vector<int64_t> eligible = {1, 2, 3, 5, 6, 7};
    const auto res = loss_pseudo(logits, eligible, 0.6);
    bool near_beta = false;
    std::vector<double> p(3);
    for (int64_t node : eligible) {
      softmax_row(logits.row(node), p);
      near_beta |= std::abs(*std::max_element(p.begin(), p.end()) - 0.6) < 1e-3;
    }
    if (near_beta) continue;
    auto f = [&] { return loss_pseudo(logits, eligible, 0.6).loss; };
    CHECK(oracle::max_relative_error(res.grad_logits.data, oracle::numeric_gradient(f, logits.data)) < 1e-4);
  }
}

TEST_CASE("total loss combination") {
  CHECK(total_loss(1.0, 1.0, 1.0, {1.0, 1.0, true, true}) == 3.0);
  CHECK(total_loss(0.7, 5.0, 9.0, {1.0, 1.0, false, false}) == 0.7);
  CHECK(total_loss(0.7, 5.0, 9.0, {2.0, 1.0, true, false}) == 10.7);
  CHECK(total_loss(0.7, 5.0, 9.0, {2.0, 1.0, false, true}) == 9.7);
  CHECK_THROWS(total_loss(1.0, 1.0, 1.0, {-1.0, 1.0, true, true}));
}

TEST_CASE("chi-squared critical value sanity") {
  boost::math::chi_squared dist(1.0);
  CHECK(boost::math::quantile(boost::math::complement(dist, 0.05)) == doctest::Approx(3.841458820694124));
}
