#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "clif/cluster.hpp"
#include "clif/error.hpp"
#include "clif/simd.hpp"
#include "clif/synth.hpp"

using clif::simd::Isa;

namespace {

std::vector<const clif::simd::KernelTable*> vector_tables() {
  std::vector<const clif::simd::KernelTable*> out;
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (const auto* t = clif::simd::kernels_for(isa)) out.push_back(t);
  }
  return out;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar kernels are always available") {
  const auto* scalar = clif::simd::kernels_for(Isa::scalar);
  REQUIRE(scalar != nullptr);
  CHECK(scalar->isa == Isa::scalar);
  CHECK(clif::simd::kernels_for(clif::simd::detected_isa()) != nullptr);
}

TEST_CASE("isa names round-trip") {
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    CHECK(clif::simd::parse_isa(clif::simd::isa_name(isa)) == isa);
  }
  CHECK_FALSE(clif::simd::parse_isa("sse9").has_value());
}

TEST_CASE("squared distances: scalar reference against hand values") {
  const std::vector<double> q{0.0, 0.0};
  const std::vector<double> rows{3.0, 4.0, 1.0, 1.0, 0.0, 0.0};
  std::vector<double> out(3);
  clif::simd::kernels_for(Isa::scalar)->squared_distances(q.data(), rows.data(), 3, 2, out.data());
  CHECK(out[0] == 25.0);
  CHECK(out[1] == 2.0);
  CHECK(out[2] == 0.0);
}

TEST_CASE("vector kernels match the scalar reference bit for bit") {
  const auto* scalar = clif::simd::kernels_for(Isa::scalar);
  const auto tables = vector_tables();
  if (tables.empty()) MESSAGE("no vector kernels on this host; equivalence is vacuous");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const auto* t : tables) {
    CAPTURE(clif::simd::isa_name(t->isa));
    // Row counts straddle the 4-wide and 2-wide blocks, dims include 1.
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 64u, 257u}) {
      for (std::size_t dim : {1u, 2u, 3u, 5u, 12u, 33u}) {
        std::vector<double> rows(n * dim), q(dim);
        for (auto& v : rows) v = u(rng);
        for (auto& v : q) v = u(rng);
        std::vector<double> ref(n), got(n);
        scalar->squared_distances(q.data(), rows.data(), n, dim, ref.data());
        t->squared_distances(q.data(), rows.data(), n, dim, got.data());
        CHECK(same_bits(ref, got));

        std::vector<double> floors(n);
        for (auto& v : floors) v = u(rng) * u(rng);
        const double floor = u(rng);
        auto a = ref;
        auto b = ref;
        scalar->max_inplace(a.data(), floors.data(), floor, n);
        t->max_inplace(b.data(), floors.data(), floor, n);
        CHECK(same_bits(a, b));

        scalar->sqrt_inplace(a.data(), n);
        t->sqrt_inplace(b.data(), n);
        CHECK(same_bits(a, b));
      }
    }
  }
}

TEST_CASE("clustering does not depend on the active instruction set") {
  clif::synth::BlobSpec spec;
  spec.n_blobs = 4;
  spec.points_per_blob = 50;
  spec.spreads = {0.05};
  spec.n_noise = 40;
  spec.dims = 5;
  spec.seed = 3;
  const auto blobs = clif::synth::generate_blobs(spec);
  clif::cluster::HdbscanParams params{8, 8};

  clif::simd::force_isa(Isa::scalar);
  const auto ref = clif::cluster::hdbscan(blobs.points, params);
  const auto ref_core = clif::cluster::core_distances(blobs.points, 8);
  for (const auto* t : vector_tables()) {
    clif::simd::force_isa(t->isa);
    CHECK(clif::cluster::hdbscan(blobs.points, params).labels == ref.labels);
    CHECK(same_bits(clif::cluster::core_distances(blobs.points, 8), ref_core));
  }
  clif::simd::force_isa(std::nullopt);
}

TEST_CASE("forcing an unavailable variant is a configuration error") {
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (clif::simd::kernels_for(isa) == nullptr) {
      CHECK_THROWS_AS(clif::simd::force_isa(isa), clif::ConfigError);
    }
  }
  clif::simd::force_isa(std::nullopt);
}
