#include <atomic>
#include <cstdlib>
#include <string>

#include "clif/error.hpp"
#include "clif/simd.hpp"

namespace clif::simd {
namespace {

bool cpu_has(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(CLIF_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(CLIF_HAVE_NEON_KERNELS)
      return true;  // baseline on aarch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* auto_table() noexcept {
  if (const char* env = std::getenv("CLIF_SIMD"); env != nullptr && *env != '\0') {
    if (auto isa = parse_isa(env)) {
      if (const KernelTable* t = kernels_for(*isa)) return t;
    }
  }
  const KernelTable* t = kernels_for(detected_isa());
  return t != nullptr ? t : &detail::scalar_table;
}

std::atomic<const KernelTable*> g_forced{nullptr};

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) noexcept {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  return std::nullopt;
}

Isa detected_isa() noexcept {
  if (cpu_has(Isa::avx2)) return Isa::avx2;
  if (cpu_has(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

const KernelTable* kernels_for(Isa isa) noexcept {
  if (!cpu_has(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar:
      return &detail::scalar_table;
    case Isa::avx2:
#if defined(CLIF_HAVE_AVX2_KERNELS)
      return &detail::avx2_table;
#else
      return nullptr;
#endif
    case Isa::neon:
#if defined(CLIF_HAVE_NEON_KERNELS)
      return &detail::neon_table;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& kernels() noexcept {
  if (const KernelTable* forced = g_forced.load(std::memory_order_acquire)) return *forced;
  static const KernelTable* selected = auto_table();
  return *selected;
}

void force_isa(std::optional<Isa> isa) {
  if (!isa) {
    g_forced.store(nullptr, std::memory_order_release);
    return;
  }
  const KernelTable* t = kernels_for(*isa);
  if (t == nullptr) {
    throw ConfigError("SIMD variant '" + std::string(isa_name(*isa)) +
                      "' is not available on this build/CPU");
  }
  g_forced.store(t, std::memory_order_release);
}

}  // namespace clif::simd
