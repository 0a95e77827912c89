/*!
 *  Copyright (c) 2026 by Contributors
 * \file fsgcn/simd/kernels.h
 * \brief Data-parallel inner loops behind the dense and sparse operators.
 *
 * Each instruction set provides the same table of kernels. The scalar table is
 * the reference; vector tables are selected at runtime from the CPU features
 * and must agree with it to rounding (FMA contraction and lane-wise reduction
 * order are the only sources of difference). Selection is fixed for the life
 * of the process unless a caller overrides it, so results are reproducible
 * run to run on one machine.
 *
 * The environment variable FSGCN_ISA=scalar|avx2|neon pins the choice.
 */
#ifndef FSGCN_SIMD_KERNELS_H_
#define FSGCN_SIMD_KERNELS_H_

#include <cstddef>
#include <string>
#include <vector>

namespace fsgcn::simd {

enum class Isa { kScalar, kAvx2, kNeon };

struct KernelTable {
  Isa isa;
  const char* name;
  /// y += a * x
  void (*axpy)(size_t n, double a, const double* x, double* y);
  double (*dot)(size_t n, const double* x, const double* y);
  /// sum_k (x_k - y_k)^2
  double (*squared_distance)(size_t n, const double* x, const double* y);
  /// y = max(x, 0); y may alias x
  void (*relu)(size_t n, const double* x, double* y);
  /// out = upstream where activation > 0, else 0
  void (*relu_backward)(size_t n, const double* upstream, const double* activation, double* out);
  /// out = scale * x * mask; out may alias x
  void (*masked_scale)(size_t n, double scale, const double* x, const double* mask, double* out);
  /// m = b1 m + (1 - b1) g ; v = b2 v + (1 - b2) g^2
  void (*update_moments)(size_t n, double b1, double b2, const double* g, double* m, double* v);
};

const KernelTable& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_kernels();
#endif
#if defined(__aarch64__)
const KernelTable& neon_kernels();
#endif

bool isa_supported(Isa isa);
Isa best_supported_isa();
std::vector<Isa> supported_isas();
const char* isa_name(Isa isa);
Isa parse_isa(const std::string& name);

/// The table every operator dispatches through.
const KernelTable& kernels();
const KernelTable& kernels_for(Isa isa);

/// Overrides the active table (tests, benchmarking). Throws when the CPU
/// lacks the instruction set.
void set_active_isa(Isa isa);

/// RAII override used by equivalence tests.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa);
  ~ScopedIsa();
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

}  // namespace fsgcn::simd

#endif  // FSGCN_SIMD_KERNELS_H_
