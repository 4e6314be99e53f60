#include <atomic>
#include <cstdlib>
#include <string_view>

#include "normcluster/simd/kernels.hpp"

namespace normcluster::simd {

#if defined(NORMCLUSTER_HAVE_AVX2)
namespace detail {
const KernelTable& avx2_table() noexcept;
}
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(NORMCLUSTER_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_available() noexcept {
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

const KernelTable* lookup(std::string_view name) noexcept {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") return avx2_kernels();
  if (name == "auto" || name.empty()) return best_available();
  return nullptr;
}

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("NORMCLUSTER_SIMD")) {
    if (const KernelTable* t = lookup(env)) return t;
  }
  return best_available();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
#if defined(NORMCLUSTER_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

bool select(std::string_view name) noexcept {
  const KernelTable* t = lookup(name);
  if (t == nullptr) return false;
  current().store(t, std::memory_order_release);
  return true;
}

}  // namespace normcluster::simd
