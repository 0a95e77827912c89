/*!
 *  Copyright (c) 2026 by Contributors
 * \file simd/dispatch.cc
 * \brief Runtime selection of the kernel table.
 */
#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include "fsgcn/simd/kernels.h"

namespace fsgcn::simd {

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("FSGCN_ISA"); env && *env) {
    const Isa requested = parse_isa(env);
    if (isa_supported(requested)) return requested;
  }
  return best_supported_isa();
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{&kernels_for(initial_isa())};
  return table;
}

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best_supported_isa() {
  if (isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_supported(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kNeon})
    if (isa_supported(isa)) out.push_back(isa);
  return out;
}

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "?";
}

Isa parse_isa(const std::string& name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "neon") return Isa::kNeon;
  throw std::invalid_argument("unknown instruction set '" + name + "'");
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) throw std::runtime_error(std::string("instruction set not supported: ") + isa_name(isa));
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::kAvx2: return avx2_kernels();
#endif
#if defined(__aarch64__)
    case Isa::kNeon: return neon_kernels();
#endif
    default: return scalar_kernels();
  }
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) { active().store(&kernels_for(isa), std::memory_order_release); }

ScopedIsa::ScopedIsa(Isa isa) : previous_(kernels().isa) { set_active_isa(isa); }
ScopedIsa::~ScopedIsa() { set_active_isa(previous_); }

}  // namespace fsgcn::simd
