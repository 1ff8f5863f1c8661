#pragma once

// Data-parallel inner loops used by the simulator and the learner. Each
// kernel has a scalar reference implementation plus optional AVX2 and NEON
// variants; the variant is picked once at runtime from the CPU features
// (override with PATROL_KERNELS=scalar|avx2|neon).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace patrol::kernels {

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = visits[i] if max(|rows[i]-row|, |cols[i]-col|) <= radius, else -1.
  void (*mask_visits)(const std::int32_t* rows, const std::int32_t* cols, const std::int32_t* visits,
                      std::int32_t* out, std::size_t n, std::int32_t row, std::int32_t col, std::int32_t radius);
  // Number of entries <= 0.
  std::size_t (*count_nonpositive)(const std::int32_t* values, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant is not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table();
const KernelTable* neon_table();

// The table chosen for this process.
const KernelTable& active();

// Table by name ("scalar", "avx2", "neon"); nullptr if unavailable.
const KernelTable* find_table(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

}  // namespace patrol::kernels
