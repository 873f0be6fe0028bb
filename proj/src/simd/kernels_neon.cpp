#include <arm_neon.h>

#include <cmath>

#include "clif/simd.hpp"

namespace clif::simd {
namespace {

// Two points per step, one per lane; 2x2 blocks are transposed with zip so
// each lane accumulates its point's dimensions in index order.
void squared_distances_neon(const double* query, const double* rows, std::size_t n,
                            std::size_t dim, double* out) {
  const std::size_t dim_blocked = dim & ~std::size_t{1};
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const double* r0 = rows + (i + 0) * dim;
    const double* r1 = rows + (i + 1) * dim;
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k < dim_blocked; k += 2) {
      const float64x2_t a0 = vld1q_f64(r0 + k);
      const float64x2_t a1 = vld1q_f64(r1 + k);
      const float64x2_t c0 = vzip1q_f64(a0, a1);
      const float64x2_t c1 = vzip2q_f64(a0, a1);
      float64x2_t d = vsubq_f64(vdupq_n_f64(query[k + 0]), c0);
      acc = vaddq_f64(acc, vmulq_f64(d, d));
      d = vsubq_f64(vdupq_n_f64(query[k + 1]), c1);
      acc = vaddq_f64(acc, vmulq_f64(d, d));
    }
    for (; k < dim; ++k) {
      float64x2_t c = vdupq_n_f64(r0[k]);
      c = vsetq_lane_f64(r1[k], c, 1);
      const float64x2_t d = vsubq_f64(vdupq_n_f64(query[k]), c);
      acc = vaddq_f64(acc, vmulq_f64(d, d));
    }
    vst1q_f64(out + i, acc);
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

void max_inplace_neon(double* values, const double* floors, double floor, std::size_t n) {
  const float64x2_t lo = vdupq_n_f64(floor);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vld1q_f64(values + i);
    const float64x2_t f = vld1q_f64(floors + i);
    v = vbslq_f64(vcgtq_f64(f, v), f, v);
    v = vbslq_f64(vcgtq_f64(lo, v), lo, v);
    vst1q_f64(values + i, v);
  }
  for (; i < n; ++i) {
    double v = values[i];
    if (floors[i] > v) v = floors[i];
    if (floor > v) v = floor;
    values[i] = v;
  }
}

void sqrt_inplace_neon(double* values, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(values + i, vsqrtq_f64(vld1q_f64(values + i)));
  for (; i < n; ++i) values[i] = std::sqrt(values[i]);
}

}  // namespace

namespace detail {
const KernelTable neon_table{Isa::neon, squared_distances_neon, max_inplace_neon,
                             sqrt_inplace_neon};
}  // namespace detail

}  // namespace clif::simd
