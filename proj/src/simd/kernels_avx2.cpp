#include <immintrin.h>

#include <cmath>

#include "clif/simd.hpp"

namespace clif::simd {
namespace {

// Four points per step, one per lane. A 4x4 block (4 points x 4 dims) is
// transposed so lane j accumulates point j's dimensions in index order.
void squared_distances_avx2(const double* query, const double* rows, std::size_t n,
                            std::size_t dim, double* out) {
  const std::size_t dim_blocked = dim & ~std::size_t{3};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const double* r0 = rows + (i + 0) * dim;
    const double* r1 = rows + (i + 1) * dim;
    const double* r2 = rows + (i + 2) * dim;
    const double* r3 = rows + (i + 3) * dim;
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k < dim_blocked; k += 4) {
      const __m256d a0 = _mm256_loadu_pd(r0 + k);
      const __m256d a1 = _mm256_loadu_pd(r1 + k);
      const __m256d a2 = _mm256_loadu_pd(r2 + k);
      const __m256d a3 = _mm256_loadu_pd(r3 + k);
      const __m256d t0 = _mm256_unpacklo_pd(a0, a1);
      const __m256d t1 = _mm256_unpackhi_pd(a0, a1);
      const __m256d t2 = _mm256_unpacklo_pd(a2, a3);
      const __m256d t3 = _mm256_unpackhi_pd(a2, a3);
      const __m256d c0 = _mm256_permute2f128_pd(t0, t2, 0x20);
      const __m256d c1 = _mm256_permute2f128_pd(t1, t3, 0x20);
      const __m256d c2 = _mm256_permute2f128_pd(t0, t2, 0x31);
      const __m256d c3 = _mm256_permute2f128_pd(t1, t3, 0x31);

      __m256d d = _mm256_sub_pd(_mm256_set1_pd(query[k + 0]), c0);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
      d = _mm256_sub_pd(_mm256_set1_pd(query[k + 1]), c1);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
      d = _mm256_sub_pd(_mm256_set1_pd(query[k + 2]), c2);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
      d = _mm256_sub_pd(_mm256_set1_pd(query[k + 3]), c3);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    for (; k < dim; ++k) {
      const __m256d c = _mm256_set_pd(r3[k], r2[k], r1[k], r0[k]);
      const __m256d d = _mm256_sub_pd(_mm256_set1_pd(query[k]), c);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    const double* row = rows + i * dim;
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double diff = query[k] - row[k];
      acc += diff * diff;
    }
    out[i] = acc;
  }
}

void max_inplace_avx2(double* values, const double* floors, double floor, std::size_t n) {
  const __m256d lo = _mm256_set1_pd(floor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(values + i);
    const __m256d f = _mm256_loadu_pd(floors + i);
    // Same selection as the scalar `if (f > v) v = f`, including equal values.
    v = _mm256_blendv_pd(v, f, _mm256_cmp_pd(f, v, _CMP_GT_OQ));
    v = _mm256_blendv_pd(v, lo, _mm256_cmp_pd(lo, v, _CMP_GT_OQ));
    _mm256_storeu_pd(values + i, v);
  }
  for (; i < n; ++i) {
    double v = values[i];
    if (floors[i] > v) v = floors[i];
    if (floor > v) v = floor;
    values[i] = v;
  }
}

void sqrt_inplace_avx2(double* values, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(values + i, _mm256_sqrt_pd(_mm256_loadu_pd(values + i)));
  }
  for (; i < n; ++i) values[i] = std::sqrt(values[i]);
}

}  // namespace

namespace detail {
const KernelTable avx2_table{Isa::avx2, squared_distances_avx2, max_inplace_avx2,
                             sqrt_inplace_avx2};
}  // namespace detail

}  // namespace clif::simd
