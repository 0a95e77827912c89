/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/sparse.h
 * \brief Compressed sparse row matrix of doubles.
 */
#ifndef FSGCN_SPARSE_H_
#define FSGCN_SPARSE_H_

#include <cstdint>
#include <span>
#include <vector>

namespace fsgcn {

struct Triplet {
  int64_t row;
  int64_t col;
  double value;
};

/// Column indices are strictly increasing within a row and
/// offsets[rows] == nnz.
struct SparseMatrix {
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<int64_t> offsets{0};
  std::vector<int64_t> indices;
  std::vector<double> values;

  int64_t nnz() const { return static_cast<int64_t>(indices.size()); }

  std::span<const int64_t> row_indices(int64_t r) const {
    return {indices.data() + offsets[r], static_cast<size_t>(offsets[r + 1] - offsets[r])};
  }
  std::span<const double> row_values(int64_t r) const {
    return {values.data() + offsets[r], static_cast<size_t>(offsets[r + 1] - offsets[r])};
  }

  /// Stored value at (r, c), or 0 when absent. Binary search within the row.
  double at(int64_t r, int64_t c) const;

  /// Sorts the triplets and builds the CSR arrays. Throws on duplicate
  /// coordinates or out-of-range indices.
  static SparseMatrix from_triplets(int64_t rows, int64_t cols, std::vector<Triplet> entries);

  /// Checks the structural invariants; throws std::logic_error on violation.
  void validate() const;

  bool is_symmetric() const;
};

}  // namespace fsgcn

#endif  // FSGCN_SPARSE_H_
