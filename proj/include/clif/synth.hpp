#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "clif/matrix.hpp"
#include "clif/tabular.hpp"

namespace clif::synth {

struct BlobSpec {
  std::size_t n_blobs = 3;
  std::size_t points_per_blob = 60;
  /// Gaussian sigma per blob; a single value applies to all blobs.
  std::vector<double> spreads{0.02};
  std::size_t n_noise = 0;
  std::size_t dims = 2;
  std::uint64_t seed = 0;
  /// Minimum pairwise distance between blob centers.
  double center_separation = 1.0;

  void validate() const;
};

struct Blobs {
  Matrix points;
  std::vector<int> truth;  // blob index, -1 for background noise
  Matrix centers;

  /// Numerical columns x0..x{d-1}; row ids are the row numbers.
  tabular::Dataset to_dataset() const;
};

/// Isotropic Gaussian blobs at pairwise-separated centers (drawn uniformly
/// in [0, L]^d, L = separation * (n_blobs + 1)) plus uniform noise over the
/// same box widened by half a separation. Rows are blob 0, blob 1, ...,
/// then noise. Deterministic per seed.
Blobs generate_blobs(const BlobSpec& spec);

}  // namespace clif::synth
