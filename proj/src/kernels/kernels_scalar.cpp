#include "patrol/kernels.hpp"

namespace patrol::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mask_visits_scalar(const std::int32_t* rows, const std::int32_t* cols, const std::int32_t* visits,
                        std::int32_t* out, std::size_t n, std::int32_t row, std::int32_t col, std::int32_t radius) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t dr = rows[i] > row ? rows[i] - row : row - rows[i];
    const std::int32_t dc = cols[i] > col ? cols[i] - col : col - cols[i];
    out[i] = (dr <= radius && dc <= radius) ? visits[i] : -1;
  }
}

std::size_t count_nonpositive_scalar(const std::int32_t* values, std::size_t n) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += values[i] <= 0 ? 1 : 0;
  return count;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot_scalar, axpy_scalar, mask_visits_scalar, count_nonpositive_scalar};
  return table;
}

}  // namespace patrol::kernels
