#pragma once

// Distance and reduction kernels used by every engine. A scalar reference
// table is always built; vectorized tables are compiled when the toolchain
// supports them and picked at startup when the running CPU does.
//
// NORMCLUSTER_SIMD=scalar|avx2|auto overrides the startup choice.

#include <cstddef>
#include <span>
#include <string_view>

namespace normcluster::simd {

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_l2)(const double* a, const double* b, std::size_t n);
  double (*norm_squared)(const double* a, std::size_t n);
  /// acc[i] += x[i]
  void (*accumulate)(double* acc, const double* x, std::size_t n);
  /// out[r] = squared_l2(query, rows + r * n) for r in [0, n_rows)
  void (*squared_l2_rows)(const double* query, const double* rows, std::size_t n_rows,
                          std::size_t n, double* out);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the AVX2 variant was not compiled or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels() noexcept;

/// The table in use. Thread-safe.
const KernelTable& active() noexcept;

/// Switches the active table by name ("scalar", "avx2", "auto"). Returns
/// false and leaves the selection unchanged if the variant is unavailable.
bool select(std::string_view name) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_l2(std::span<const double> a, std::span<const double> b) noexcept {
  return active().squared_l2(a.data(), b.data(), a.size());
}

inline double norm_squared(std::span<const double> a) noexcept {
  return active().norm_squared(a.data(), a.size());
}

inline void accumulate(std::span<double> acc, std::span<const double> x) noexcept {
  active().accumulate(acc.data(), x.data(), acc.size());
}

}  // namespace normcluster::simd
