#include <doctest.h>

#include <cmath>
#include <vector>

#include "patrol/kernels.hpp"
#include "patrol/rng.hpp"

using namespace patrol;

namespace {

std::vector<const kernels::KernelTable*> variants() {
  std::vector<const kernels::KernelTable*> out;
  if (auto* t = kernels::avx2_table()) out.push_back(t);
  if (auto* t = kernels::neon_table()) out.push_back(t);
  return out;
}

}  // namespace

TEST_CASE("scalar reference kernels") {
  const auto& s = kernels::scalar_table();
  const double a[3] = {1, 2, 3}, b[3] = {4, -5, 6};
  CHECK(s.dot(a, b, 3) == 12.0);
  double y[3] = {1, 1, 1};
  s.axpy(2.0, a, y, 3);
  CHECK(y[2] == 7.0);
  const std::int32_t rows[4] = {0, 0, 2, 5}, cols[4] = {0, 3, 1, 5}, visits[4] = {3, 0, 1, 2};
  std::int32_t out[4];
  s.mask_visits(rows, cols, visits, out, 4, 1, 1, 1);
  CHECK(out[0] == 3);
  CHECK(out[1] == -1);
  CHECK(out[2] == 1);
  CHECK(out[3] == -1);
  CHECK(s.count_nonpositive(out, 4) == 2);
}

TEST_CASE("SIMD variants agree with the scalar reference") {
  const auto& ref = kernels::scalar_table();
  Rng rng(31);
  for (const auto* v : variants()) {
    for (std::size_t n = 0; n < 70; ++n) {
      std::vector<double> a(n), b(n), y1(n), y2(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.uniform01() * 4 - 2;
        b[i] = rng.uniform01() * 4 - 2;
        y1[i] = y2[i] = rng.uniform01();
      }
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
      CHECK(std::abs(v->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-13 * (1.0 + mag));
      ref.axpy(0.37, a.data(), y1.data(), n);
      v->axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (1.0 + std::abs(y1[i])));

      std::vector<std::int32_t> rows(n), cols(n), visits(n), o1(n), o2(n);
      for (std::size_t i = 0; i < n; ++i) {
        rows[i] = static_cast<std::int32_t>(rng.uniform_index(30));
        cols[i] = static_cast<std::int32_t>(rng.uniform_index(30));
        visits[i] = static_cast<std::int32_t>(rng.uniform_index(4));
      }
      const auto r = static_cast<std::int32_t>(rng.uniform_index(30));
      const auto c = static_cast<std::int32_t>(rng.uniform_index(30));
      const auto radius = static_cast<std::int32_t>(rng.uniform_index(8));
      ref.mask_visits(rows.data(), cols.data(), visits.data(), o1.data(), n, r, c, radius);
      v->mask_visits(rows.data(), cols.data(), visits.data(), o2.data(), n, r, c, radius);
      CHECK(o1 == o2);
      CHECK(ref.count_nonpositive(o1.data(), n) == v->count_nonpositive(o1.data(), n));
    }
  }
}

TEST_CASE("table lookup") {
  CHECK(kernels::find_table("scalar") == &kernels::scalar_table());
  CHECK(kernels::find_table("nope") == nullptr);
}
