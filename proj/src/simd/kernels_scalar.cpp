#include <cmath>

#include "clif/simd.hpp"

namespace clif::simd {
namespace {

void squared_distances_scalar(const double* query, const double* rows, std::size_t n,
                              std::size_t dim, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = rows + i * dim;
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double diff = query[k] - row[k];
      acc += diff * diff;
    }
    out[i] = acc;
  }
}

void max_inplace_scalar(double* values, const double* floors, double floor, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = values[i];
    if (floors[i] > v) v = floors[i];
    if (floor > v) v = floor;
    values[i] = v;
  }
}

void sqrt_inplace_scalar(double* values, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) values[i] = std::sqrt(values[i]);
}

}  // namespace

namespace detail {
const KernelTable scalar_table{Isa::scalar, squared_distances_scalar, max_inplace_scalar,
                               sqrt_inplace_scalar};
}  // namespace detail

}  // namespace clif::simd
