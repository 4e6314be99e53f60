#include "normcluster/simd/kernels.hpp"

namespace normcluster::simd {
namespace {

double dot_ref(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double squared_l2_ref(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double norm_squared_ref(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

void accumulate_ref(double* acc, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void squared_l2_rows_ref(const double* query, const double* rows, std::size_t n_rows,
                         std::size_t n, double* out) {
  for (std::size_t r = 0; r < n_rows; ++r) out[r] = squared_l2_ref(query, rows + r * n, n);
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{"scalar",      dot_ref,        squared_l2_ref,
                                 norm_squared_ref, accumulate_ref, squared_l2_rows_ref};
  return table;
}

}  // namespace normcluster::simd
