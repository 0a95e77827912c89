/*!
 *  Copyright (c) 2026 by Contributors
 * \file sparse.cc
 */
#include "fsgcn/sparse.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fsgcn {

double SparseMatrix::at(int64_t r, int64_t c) const {
  auto idx = row_indices(r);
  auto it = std::lower_bound(idx.begin(), idx.end(), c);
  if (it == idx.end() || *it != c) return 0.0;
  return values[offsets[r] + (it - idx.begin())];
}

SparseMatrix SparseMatrix::from_triplets(int64_t rows, int64_t cols, std::vector<Triplet> entries) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.offsets.assign(static_cast<size_t>(rows) + 1, 0);
  m.indices.reserve(entries.size());
  m.values.reserve(entries.size());
  for (size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
      throw std::out_of_range("SparseMatrix: entry (" + std::to_string(e.row) + ", " +
                              std::to_string(e.col) + ") outside shape");
    if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col)
      throw std::invalid_argument("SparseMatrix: duplicate entry (" + std::to_string(e.row) + ", " +
                                  std::to_string(e.col) + ")");
    ++m.offsets[e.row + 1];
    m.indices.push_back(e.col);
    m.values.push_back(e.value);
  }
  for (int64_t r = 0; r < rows; ++r) m.offsets[r + 1] += m.offsets[r];
  return m;
}

void SparseMatrix::validate() const {
  if (static_cast<int64_t>(offsets.size()) != rows + 1 || offsets.front() != 0 ||
      offsets.back() != nnz() || values.size() != indices.size())
    throw std::logic_error("SparseMatrix: inconsistent offsets");
  for (int64_t r = 0; r < rows; ++r) {
    if (offsets[r] > offsets[r + 1]) throw std::logic_error("SparseMatrix: offsets not monotone");
    for (int64_t k = offsets[r]; k < offsets[r + 1]; ++k) {
      if (indices[k] < 0 || indices[k] >= cols) throw std::logic_error("SparseMatrix: column out of range");
      if (k > offsets[r] && indices[k] <= indices[k - 1])
        throw std::logic_error("SparseMatrix: columns not strictly increasing");
      if (!std::isfinite(values[k])) throw std::logic_error("SparseMatrix: non-finite value");
    }
  }
}

bool SparseMatrix::is_symmetric() const {
  if (rows != cols) return false;
  for (int64_t r = 0; r < rows; ++r) {
    auto idx = row_indices(r);
    auto val = row_values(r);
    for (size_t k = 0; k < idx.size(); ++k)
      if (at(idx[k], r) != val[k]) return false;
  }
  return true;
}

}  // namespace fsgcn
