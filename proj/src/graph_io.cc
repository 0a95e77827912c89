/*!
 *  Copyright (c) 2026 by Contributors
 * \file graph_io.cc
 * \brief Graph artifact (de)serialization.
 */
#include <stdexcept>

#include "binary_io.h"
#include "fsgcn/graph.h"

namespace fsgcn {

namespace {
constexpr uint32_t kGraphVersion = 1;
}

void save_graph(const std::string& path, const GraphArtifact& artifact) {
  const auto& g = artifact.graph;
  if (artifact.doc_ids.size() != static_cast<size_t>(g.indexing.n_docs) ||
      artifact.words.size() != static_cast<size_t>(g.indexing.n_words))
    throw std::invalid_argument("save_graph: node names do not match indexing");
  io::Writer w(path);
  w.magic("FSGR");
  w.pod<uint32_t>(kGraphVersion);
  w.pod<uint8_t>(static_cast<uint8_t>(g.mode));
  w.pod<int64_t>(g.indexing.n_docs);
  w.pod<int64_t>(g.indexing.n_words);
  for (const auto& id : artifact.doc_ids) w.str(id);
  for (const auto& word : artifact.words) w.str(word);
  w.vec(g.adjacency.offsets);
  w.vec(g.adjacency.indices);
  w.vec(g.adjacency.values);
  w.finish();
}

GraphArtifact load_graph(const std::string& path) {
  io::Reader r(path);
  r.expect_magic("FSGR");
  const auto version = r.pod<uint32_t>();
  if (version != kGraphVersion)
    throw std::runtime_error(path + ": unsupported graph version " + std::to_string(version));
  GraphArtifact a;
  const auto mode = r.pod<uint8_t>();
  if (mode > 1) throw std::runtime_error(path + ": unknown graph mode");
  a.graph.mode = static_cast<GraphMode>(mode);
  a.graph.indexing.n_docs = r.pod<int64_t>();
  a.graph.indexing.n_words = r.pod<int64_t>();
  if (a.graph.indexing.n_docs < 0 || a.graph.indexing.n_words < 0)
    throw std::runtime_error(path + ": negative node counts");
  for (int64_t i = 0; i < a.graph.indexing.n_docs; ++i) a.doc_ids.push_back(r.str());
  for (int64_t i = 0; i < a.graph.indexing.n_words; ++i) a.words.push_back(r.str());
  auto& adj = a.graph.adjacency;
  adj.rows = adj.cols = a.graph.indexing.n_nodes();
  adj.offsets = r.vec<int64_t>();
  adj.indices = r.vec<int64_t>();
  adj.values = r.vec<double>();
  adj.validate();
  if (!adj.is_symmetric()) throw std::runtime_error(path + ": adjacency is not symmetric");
  a.graph.normalized = normalize_adjacency(adj);
  return a;
}

}  // namespace fsgcn
