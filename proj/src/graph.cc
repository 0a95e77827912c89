/*!
 *  Copyright (c) 2026 by Contributors
 * \file graph.cc
 * \brief Word-document graph construction.
 */
#include "fsgcn/graph.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace fsgcn {

const char* graph_mode_name(GraphMode mode) {
  return mode == GraphMode::kDocWordOnly ? "doc-word" : "with-word-word";
}

GraphMode parse_graph_mode(const std::string& name) {
  if (name == "doc-word" || name == "doc_word_only") return GraphMode::kDocWordOnly;
  if (name == "with-word-word" || name == "with_word_word") return GraphMode::kWithWordWord;
  throw std::invalid_argument("unknown graph mode '" + name + "' (expected doc-word or with-word-word)");
}

namespace {

// In-vocabulary token ids of one document, in order.
std::vector<int32_t> vocab_ids(const RawDocument& doc, const Vocabulary& vocab) {
  std::vector<int32_t> ids;
  ids.reserve(doc.tokens.size());
  for (const auto& tok : doc.tokens) {
    const int32_t w = vocab.find(tok);
    if (w >= 0) ids.push_back(w);
  }
  return ids;
}

uint64_t pair_key(int32_t a, int32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) | static_cast<uint32_t>(b);
}

}  // namespace

std::vector<DocWordEdge> tfidf_edges(const TokenizedCorpus& corpus, const Vocabulary& vocab) {
  const auto n_docs = static_cast<int64_t>(corpus.size());
  std::vector<std::vector<std::pair<int32_t, int64_t>>> per_doc(corpus.size());
  std::vector<int64_t> df(vocab.size(), 0);
  std::vector<int64_t> tf(vocab.size(), 0);
  for (size_t d = 0; d < corpus.size(); ++d) {
    const auto ids = vocab_ids(corpus.docs[d], vocab);
    std::vector<int32_t> touched;
    for (int32_t w : ids) {
      if (tf[w]++ == 0) touched.push_back(w);
    }
    std::sort(touched.begin(), touched.end());
    for (int32_t w : touched) {
      per_doc[d].emplace_back(w, tf[w]);
      ++df[w];
      tf[w] = 0;
    }
  }

  std::vector<DocWordEdge> edges;
  for (size_t d = 0; d < corpus.size(); ++d) {
    for (const auto& [w, count] : per_doc[d]) {
      if (df[w] == n_docs) continue;
      const double idf = std::log(static_cast<double>(n_docs) / static_cast<double>(df[w]));
      const double weight = static_cast<double>(count) * idf;
      if (weight > 0.0) edges.push_back({static_cast<int64_t>(d), w, weight});
    }
  }
  return edges;
}

std::vector<WordWordEdge> pmi_edges(const TokenizedCorpus& corpus, const Vocabulary& vocab,
                                    int64_t window_size, PmiCounting counting) {
  if (window_size < 1) throw std::invalid_argument("pmi_edges: window_size must be >= 1");

  int64_t n_windows = 0;
  std::vector<int64_t> word_windows(vocab.size(), 0);
  std::unordered_map<uint64_t, int64_t> pair_windows;
  pair_windows.reserve(1 << 16);

  std::vector<int32_t> distinct;
  for (const auto& doc : corpus.docs) {
    const auto ids = vocab_ids(doc, vocab);
    if (ids.empty()) continue;
    const auto len = static_cast<int64_t>(ids.size());
    const int64_t span = std::min(len, window_size);
    const int64_t starts = len <= window_size ? 1 : len - window_size + 1;
    for (int64_t s = 0; s < starts; ++s) {
      ++n_windows;
      const int32_t* win = ids.data() + s;
      if (counting == PmiCounting::kPresence) {
        distinct.assign(win, win + span);
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (size_t a = 0; a < distinct.size(); ++a) {
          ++word_windows[distinct[a]];
          for (size_t b = a + 1; b < distinct.size(); ++b) ++pair_windows[pair_key(distinct[a], distinct[b])];
        }
      } else {
        for (int64_t p = 0; p < span; ++p) {
          ++word_windows[win[p]];
          for (int64_t q = p + 1; q < span; ++q)
            if (win[p] != win[q]) ++pair_windows[pair_key(win[p], win[q])];
        }
      }
    }
  }

  std::vector<WordWordEdge> edges;
  const auto total = static_cast<double>(n_windows);
  for (const auto& [key, count] : pair_windows) {
    const auto a = static_cast<int32_t>(key >> 32);
    const auto b = static_cast<int32_t>(key & 0xffffffffu);
    const double p_ab = static_cast<double>(count) / total;
    const double p_a = static_cast<double>(word_windows[a]) / total;
    const double p_b = static_cast<double>(word_windows[b]) / total;
    const double pmi = std::log(p_ab / (p_a * p_b));
    if (pmi > 0.0) edges.push_back({a, b, pmi});
  }
  std::sort(edges.begin(), edges.end(), [](const WordWordEdge& x, const WordWordEdge& y) {
    return x.word_a != y.word_a ? x.word_a < y.word_a : x.word_b < y.word_b;
  });
  return edges;
}

WordDocumentGraph build_adjacency(const std::vector<DocWordEdge>& doc_word,
                                  const std::optional<std::vector<WordWordEdge>>& word_word,
                                  const NodeIndexing& indexing) {
  const int64_t n = indexing.n_nodes();
  std::vector<Triplet> entries;
  entries.reserve(2 * doc_word.size() + (word_word ? 2 * word_word->size() : 0) + n);
  for (int64_t i = 0; i < n; ++i) entries.push_back({i, i, 1.0});
  for (const auto& e : doc_word) {
    if (e.doc < 0 || e.doc >= indexing.n_docs || e.word < 0 || e.word >= indexing.n_words)
      throw std::out_of_range("build_adjacency: doc-word edge outside node range");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw std::invalid_argument("build_adjacency: doc-word weights must be positive and finite");
    const int64_t d = indexing.doc_node(e.doc);
    const int64_t w = indexing.word_node(e.word);
    entries.push_back({d, w, e.weight});
    entries.push_back({w, d, e.weight});
  }
  if (word_word) {
    for (const auto& e : *word_word) {
      if (e.word_a < 0 || e.word_b < 0 || e.word_a >= indexing.n_words || e.word_b >= indexing.n_words)
        throw std::out_of_range("build_adjacency: word-word edge outside node range");
      if (e.word_a == e.word_b) throw std::invalid_argument("build_adjacency: word-word self edge");
      if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        throw std::invalid_argument("build_adjacency: word-word weights must be positive and finite");
      const int64_t a = indexing.word_node(e.word_a);
      const int64_t b = indexing.word_node(e.word_b);
      entries.push_back({a, b, e.weight});
      entries.push_back({b, a, e.weight});
    }
  }

  WordDocumentGraph g;
  g.indexing = indexing;
  g.mode = word_word ? GraphMode::kWithWordWord : GraphMode::kDocWordOnly;
  g.adjacency = SparseMatrix::from_triplets(n, n, std::move(entries));
  g.normalized = normalize_adjacency(g.adjacency);
  return g;
}

SparseMatrix normalize_adjacency(const SparseMatrix& adjacency) {
  if (adjacency.rows != adjacency.cols) throw std::invalid_argument("normalize_adjacency: matrix not square");
  std::vector<double> degree(adjacency.rows);
  for (int64_t r = 0; r < adjacency.rows; ++r) {
    double deg = 0.0;
    for (double v : adjacency.row_values(r)) deg += v;
    if (!(deg > 0.0)) throw std::logic_error("normalize_adjacency: non-positive degree at row " + std::to_string(r));
    degree[r] = deg;
  }
  SparseMatrix out = adjacency;
  for (int64_t r = 0; r < adjacency.rows; ++r) {
    for (int64_t k = adjacency.offsets[r]; k < adjacency.offsets[r + 1]; ++k) {
      const int64_t c = adjacency.indices[k];
      // deg(r) * deg(c) commutes exactly, so (r, c) and (c, r) agree bitwise.
      out.values[k] = adjacency.values[k] / std::sqrt(degree[r] * degree[c]);
    }
  }
  return out;
}

BuiltGraph build_graph(const TokenizedCorpus& corpus, const GraphBuildOptions& options) {
  BuiltGraph out;
  out.vocab = build_vocabulary(corpus, options.min_frequency);
  NodeIndexing indexing{static_cast<int64_t>(corpus.size()), static_cast<int64_t>(out.vocab.size())};
  auto doc_word = tfidf_edges(corpus, out.vocab);
  std::optional<std::vector<WordWordEdge>> word_word;
  if (options.mode == GraphMode::kWithWordWord)
    word_word = pmi_edges(corpus, out.vocab, options.window_size, options.pmi_counting);
  out.graph = build_adjacency(doc_word, word_word, indexing);
  return out;
}

}  // namespace fsgcn
