// NEON variants for AArch64, where Advanced SIMD is part of the base ISA.

#include <arm_neon.h>

#include "patrol/kernels.hpp"

namespace patrol::kernels {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mask_visits_neon(const std::int32_t* rows, const std::int32_t* cols, const std::int32_t* visits,
                      std::int32_t* out, std::size_t n, std::int32_t row, std::int32_t col, std::int32_t radius) {
  const int32x4_t vrow = vdupq_n_s32(row);
  const int32x4_t vcol = vdupq_n_s32(col);
  const int32x4_t vrad = vdupq_n_s32(radius);
  const int32x4_t masked = vdupq_n_s32(-1);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const int32x4_t dr = vabdq_s32(vld1q_s32(rows + i), vrow);
    const int32x4_t dc = vabdq_s32(vld1q_s32(cols + i), vcol);
    const uint32x4_t inside = vandq_u32(vcleq_s32(dr, vrad), vcleq_s32(dc, vrad));
    vst1q_s32(out + i, vbslq_s32(inside, vld1q_s32(visits + i), masked));
  }
  for (; i < n; ++i) {
    const std::int32_t dr = rows[i] > row ? rows[i] - row : row - rows[i];
    const std::int32_t dc = cols[i] > col ? cols[i] - col : col - cols[i];
    out[i] = (dr <= radius && dc <= radius) ? visits[i] : -1;
  }
}

std::size_t count_nonpositive_neon(const std::int32_t* values, std::size_t n) {
  const int32x4_t zero = vdupq_n_s32(0);
  uint32x4_t acc = vdupq_n_u32(0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = vsubq_u32(acc, vcleq_s32(vld1q_s32(values + i), zero));
  }
  std::size_t count = vaddvq_u32(acc);
  for (; i < n; ++i) count += values[i] <= 0 ? 1 : 0;
  return count;
}

}  // namespace

const KernelTable& neon_table_unchecked() {
  static const KernelTable table{"neon", dot_neon, axpy_neon, mask_visits_neon, count_nonpositive_neon};
  return table;
}

}  // namespace patrol::kernels
