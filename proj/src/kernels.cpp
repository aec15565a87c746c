#include "kanfis/kernels.hpp"

#include <atomic>

#include "kanfis/error.hpp"

namespace kanfis::kernels {

#if defined(KANFIS_HAVE_AVX2)
namespace detail {
const Table& avx2_table_impl();
}
#endif

bool cpu_supports_avx2() {
#if defined(KANFIS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported;
#else
  return false;
#endif
}

const Table* avx2_table() {
#if defined(KANFIS_HAVE_AVX2)
  if (cpu_supports_avx2()) return &detail::avx2_table_impl();
#endif
  return nullptr;
}

namespace {

std::atomic<const Table*> g_override{nullptr};

}  // namespace

const Table& active() {
  if (const Table* t = g_override.load(std::memory_order_acquire)) return *t;
  if (const Table* t = avx2_table()) return *t;
  return scalar_table();
}

void select(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      g_override.store(&scalar_table(), std::memory_order_release);
      return;
    case Isa::Avx2:
      if (const Table* t = avx2_table()) {
        g_override.store(t, std::memory_order_release);
        return;
      }
      throw ConfigError("AVX2 kernels are not available on this machine");
  }
}

void select_auto() { g_override.store(nullptr, std::memory_order_release); }

}  // namespace kanfis::kernels
