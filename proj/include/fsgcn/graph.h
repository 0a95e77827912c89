/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/graph.h
 * \brief Word-document graph construction: TF-IDF document-word edges,
 *        optional PMI word-word edges, unit self-loops, symmetric
 *        normalization and a versioned on-disk format.
 */
#ifndef FSGCN_GRAPH_H_
#define FSGCN_GRAPH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsgcn/corpus.h"
#include "fsgcn/sparse.h"

namespace fsgcn {

/// Documents occupy node indices [0, n_docs), words [n_docs, n_docs + n_words).
struct NodeIndexing {
  int64_t n_docs = 0;
  int64_t n_words = 0;

  int64_t n_nodes() const { return n_docs + n_words; }
  int64_t doc_node(int64_t doc) const { return doc; }
  int64_t word_node(int64_t word) const { return n_docs + word; }
  bool is_doc(int64_t node) const { return node < n_docs; }
  bool is_word(int64_t node) const { return node >= n_docs && node < n_nodes(); }
  int64_t word_of(int64_t node) const { return node - n_docs; }
};

enum class GraphMode : uint8_t { kDocWordOnly = 0, kWithWordWord = 1 };

const char* graph_mode_name(GraphMode mode);
GraphMode parse_graph_mode(const std::string& name);

struct DocWordEdge {
  int64_t doc;
  int64_t word;
  double weight;
};

struct WordWordEdge {
  int64_t word_a;  // word_a < word_b
  int64_t word_b;
  double weight;
};

struct WordDocumentGraph {
  NodeIndexing indexing;
  GraphMode mode = GraphMode::kDocWordOnly;
  SparseMatrix adjacency;   // raw weights, unit diagonal
  SparseMatrix normalized;  // D^-1/2 A D^-1/2

  /// Number of stored off-diagonal entries (each undirected edge counted twice).
  int64_t off_diagonal_nnz() const { return adjacency.nnz() - indexing.n_nodes(); }
};

/// tf(w, d) * ln(N / df(w)) over all documents; pruned tokens are skipped and
/// words present in every document (idf = 0) produce no edge. Sorted by
/// (doc, word).
std::vector<DocWordEdge> tfidf_edges(const TokenizedCorpus& corpus, const Vocabulary& vocab);

enum class PmiCounting {
  kPresence,      // a window counts each word / pair once
  kMultiplicity,  // every token occurrence and position pair counts
};

/// Sliding windows of `window_size` tokens, stride 1, over each document's
/// in-vocabulary tokens; a document shorter than the window is one window.
/// Emits each unordered pair with PMI > 0 once, sorted by (word_a, word_b).
std::vector<WordWordEdge> pmi_edges(const TokenizedCorpus& corpus, const Vocabulary& vocab,
                                    int64_t window_size = 20,
                                    PmiCounting counting = PmiCounting::kPresence);

/// Symmetric adjacency with unit diagonal. Supplying word-word edges selects
/// kWithWordWord mode. Duplicate edges throw.
WordDocumentGraph build_adjacency(const std::vector<DocWordEdge>& doc_word,
                                  const std::optional<std::vector<WordWordEdge>>& word_word,
                                  const NodeIndexing& indexing);

/// A[i][j] / sqrt(deg(i) deg(j)), deg(i) = sum_j A[i][j]. Pattern unchanged.
SparseMatrix normalize_adjacency(const SparseMatrix& adjacency);

struct GraphBuildOptions {
  GraphMode mode = GraphMode::kDocWordOnly;
  int64_t window_size = 20;
  int64_t min_frequency = 5;
  PmiCounting pmi_counting = PmiCounting::kPresence;
};

/// Vocabulary + edges + adjacency + normalization in one call.
struct BuiltGraph {
  Vocabulary vocab;
  WordDocumentGraph graph;
};
BuiltGraph build_graph(const TokenizedCorpus& corpus, const GraphBuildOptions& options);

/// Binary graph artifact: magic, version, mode, counts, node names, and the
/// raw CSR. The normalized matrix is recomputed on load.
struct GraphArtifact {
  WordDocumentGraph graph;
  std::vector<std::string> doc_ids;
  std::vector<std::string> words;
};
void save_graph(const std::string& path, const GraphArtifact& artifact);
GraphArtifact load_graph(const std::string& path);

}  // namespace fsgcn

#endif  // FSGCN_GRAPH_H_
