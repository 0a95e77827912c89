/*!
 *  Copyright (c) 2026 by Contributors
 * \file sampler.cc
 * \brief Triplet sampler for 2-hop neighborhood regularization.
 */
#include <algorithm>
#include <stdexcept>

#include "fsgcn/objectives.h"

namespace fsgcn {

namespace {

// k-th (0-based) integer in [0, n) that is not in the sorted list `taken`.
int64_t kth_excluded(int64_t k, std::span<const int64_t> taken) {
  int64_t x = k;
  for (int64_t t : taken) {
    if (t <= x) {
      ++x;
    } else {
      break;
    }
  }
  return x;
}

}  // namespace

TripletBatch sample_triplets(const WordDocumentGraph& graph, std::span<const int64_t> anchor_pool, Rng& rng,
                             HopPath path) {
  if (path != HopPath::kDocWordDoc) throw std::invalid_argument("sample_triplets: unsupported hop path");
  const auto& adj = graph.adjacency;
  const auto& ix = graph.indexing;
  TripletBatch batch;
  batch.triplets.reserve(anchor_pool.size());
  std::vector<double> cumulative;
  std::vector<int64_t> words;

  for (int64_t u : anchor_pool) {
    if (!ix.is_doc(u)) throw std::invalid_argument("sample_triplets: anchor " + std::to_string(u) + " is not a document");
    auto cols = adj.row_indices(u);
    auto vals = adj.row_values(u);
    // Columns are sorted, so word neighbors form the tail of the row.
    const auto first_word = std::lower_bound(cols.begin(), cols.end(), ix.n_docs) - cols.begin();
    words.assign(cols.begin() + first_word, cols.end());
    if (words.empty()) {
      ++batch.skipped_no_words;
      continue;
    }
    cumulative.resize(words.size());
    double total = 0.0;
    for (size_t k = 0; k < words.size(); ++k) {
      total += vals[first_word + static_cast<int64_t>(k)];
      cumulative[k] = total;
    }
    const double r = rng.uniform() * total;
    auto pick = std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin();
    if (pick >= static_cast<int64_t>(words.size())) pick = static_cast<int64_t>(words.size()) - 1;
    const int64_t v = words[pick];

    auto v_cols = adj.row_indices(v);
    const auto n_doc_neighbors = std::lower_bound(v_cols.begin(), v_cols.end(), ix.n_docs) - v_cols.begin();
    std::span<const int64_t> doc_neighbors = v_cols.subspan(0, static_cast<size_t>(n_doc_neighbors));
    const int64_t outside = ix.n_docs - static_cast<int64_t>(doc_neighbors.size());
    if (outside == 0) {
      ++batch.skipped_no_negative;
      continue;
    }
    const int64_t positive = doc_neighbors[rng.uniform_index(doc_neighbors.size())];
    const int64_t negative = kth_excluded(static_cast<int64_t>(rng.uniform_index(outside)), doc_neighbors);
    batch.triplets.push_back({u, v, positive, negative});
  }
  return batch;
}

}  // namespace fsgcn
