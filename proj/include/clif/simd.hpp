#pragma once

// Distance kernels with runtime ISA selection.
//
// Every variant is bit-identical to the scalar reference: lanes run across
// points (never across dimensions), each lane accumulates its dimensions in
// index order, and no multiply-add is fused. Clustering results therefore do
// not depend on which instruction set the host supports.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "clif/matrix.hpp"

namespace clif::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view name) noexcept;

struct KernelTable {
  Isa isa;
  // out[i] = sum_k (query[k] - rows[i*dim + k])^2 for i in [0, n)
  void (*squared_distances)(const double* query, const double* rows, std::size_t n,
                            std::size_t dim, double* out);
  // values[i] = max(values[i], floors[i], floor)
  void (*max_inplace)(double* values, const double* floors, double floor, std::size_t n);
  // values[i] = sqrt(values[i])
  void (*sqrt_inplace)(double* values, std::size_t n);
};

/// Best ISA the running CPU supports among the compiled variants.
Isa detected_isa() noexcept;

/// Kernel table for `isa`, or nullptr when that variant is not compiled in or
/// the CPU lacks it.
const KernelTable* kernels_for(Isa isa) noexcept;

/// Kernels used by the library. Defaults to detected_isa(), overridable by the
/// CLIF_SIMD environment variable (scalar|avx2|neon) or force_isa().
const KernelTable& kernels() noexcept;

/// Pin the active variant (tests, benchmarks). Throws ConfigError if the
/// variant is unavailable. std::nullopt restores automatic selection.
void force_isa(std::optional<Isa> isa);

namespace detail {
extern const KernelTable scalar_table;
#if defined(CLIF_HAVE_AVX2_KERNELS)
extern const KernelTable avx2_table;
#endif
#if defined(CLIF_HAVE_NEON_KERNELS)
extern const KernelTable neon_table;
#endif
}  // namespace detail

// Convenience wrappers over the active table.

inline void squared_distances(std::span<const double> query, const Matrix& points,
                              std::span<double> out) {
  kernels().squared_distances(query.data(), points.data(), points.rows(), points.cols(),
                              out.data());
}

}  // namespace clif::simd
