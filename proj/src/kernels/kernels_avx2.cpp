// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma;
// nothing here may run before the dispatcher has checked the CPU.

#include <immintrin.h>

#include "patrol/kernels.hpp"

namespace patrol::kernels {

namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc0);
  const __m128d hi = _mm256_extractf128_pd(acc0, 1);
  __m128d sum = _mm_add_pd(lo, hi);
  sum = _mm_add_sd(sum, _mm_unpackhi_pd(sum, sum));
  double acc = _mm_cvtsd_f64(sum);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void mask_visits_avx2(const std::int32_t* rows, const std::int32_t* cols, const std::int32_t* visits,
                      std::int32_t* out, std::size_t n, std::int32_t row, std::int32_t col, std::int32_t radius) {
  const __m256i vrow = _mm256_set1_epi32(row);
  const __m256i vcol = _mm256_set1_epi32(col);
  const __m256i vrad = _mm256_set1_epi32(radius);
  const __m256i masked = _mm256_set1_epi32(-1);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i r = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(rows + i));
    const __m256i c = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(cols + i));
    const __m256i dr = _mm256_abs_epi32(_mm256_sub_epi32(r, vrow));
    const __m256i dc = _mm256_abs_epi32(_mm256_sub_epi32(c, vcol));
    const __m256i outside = _mm256_or_si256(_mm256_cmpgt_epi32(dr, vrad), _mm256_cmpgt_epi32(dc, vrad));
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(visits + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_blendv_epi8(v, masked, outside));
  }
  for (; i < n; ++i) {
    const std::int32_t dr = rows[i] > row ? rows[i] - row : row - rows[i];
    const std::int32_t dc = cols[i] > col ? cols[i] - col : col - cols[i];
    out[i] = (dr <= radius && dc <= radius) ? visits[i] : -1;
  }
}

std::size_t count_nonpositive_avx2(const std::int32_t* values, std::size_t n) {
  const __m256i one = _mm256_set1_epi32(1);
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(values + i));
    // lanes with 1 > v are all-ones (-1); subtracting counts them
    acc = _mm256_sub_epi32(acc, _mm256_cmpgt_epi32(one, v));
  }
  alignas(32) std::int32_t lanes[8];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::size_t count = 0;
  for (std::int32_t lane : lanes) count += static_cast<std::size_t>(lane);
  for (; i < n; ++i) count += values[i] <= 0 ? 1 : 0;
  return count;
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{"avx2", dot_avx2, axpy_avx2, mask_visits_avx2, count_nonpositive_avx2};
  return table;
}

}  // namespace patrol::kernels
