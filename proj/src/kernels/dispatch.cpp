#include <cstdlib>
#include <string>

#include "patrol/kernels.hpp"

namespace patrol::kernels {

#if defined(PATROL_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table_unchecked();
#endif
#if defined(PATROL_HAVE_NEON_KERNELS)
const KernelTable& neon_table_unchecked();
#endif

const KernelTable* avx2_table() {
#if defined(PATROL_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(PATROL_HAVE_NEON_KERNELS)
  return &neon_table_unchecked();
#else
  return nullptr;
#endif
}

const KernelTable* find_table(std::string_view name) {
  if (name == "scalar") return &scalar_table();
  if (name == "avx2") return avx2_table();
  if (name == "neon") return neon_table();
  return nullptr;
}

namespace {

const KernelTable& choose() {
  if (const char* forced = std::getenv("PATROL_KERNELS"); forced != nullptr && *forced != '\0') {
    if (const KernelTable* t = find_table(forced)) return *t;
  }
  if (const KernelTable* t = avx2_table()) return *t;
  if (const KernelTable* t = neon_table()) return *t;
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = choose();
  return table;
}

}  // namespace patrol::kernels
