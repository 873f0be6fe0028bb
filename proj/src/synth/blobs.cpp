#include <cmath>
#include <random>
#include <string>

#include "clif/error.hpp"
#include "clif/synth.hpp"

namespace clif::synth {

void BlobSpec::validate() const {
  if (dims < 1) throw ConfigError("dims must be at least 1");
  if (spreads.empty()) throw ConfigError("at least one spread is required");
  if (spreads.size() != 1 && spreads.size() != n_blobs) {
    throw ConfigError("spreads must have 1 or n_blobs entries");
  }
  for (double s : spreads) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("spreads must be positive");
  }
  if (!(center_separation > 0.0)) throw ConfigError("center separation must be positive");
  if (n_blobs * points_per_blob + n_noise == 0) throw ConfigError("no points requested");
}

Blobs generate_blobs(const BlobSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const double box = spec.center_separation * static_cast<double>(spec.n_blobs + 1);
  std::uniform_real_distribution<double> in_box(0.0, box);

  Blobs out;
  out.centers = Matrix(spec.n_blobs, spec.dims);
  const double sep2 = spec.center_separation * spec.center_separation;
  for (std::size_t b = 0; b < spec.n_blobs; ++b) {
    bool placed = false;
    for (int attempt = 0; attempt < 100000 && !placed; ++attempt) {
      for (std::size_t k = 0; k < spec.dims; ++k) out.centers(b, k) = in_box(rng);
      placed = true;
      for (std::size_t o = 0; o < b && placed; ++o) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < spec.dims; ++k) {
          const double diff = out.centers(b, k) - out.centers(o, k);
          d2 += diff * diff;
        }
        placed = d2 >= sep2;
      }
    }
    if (!placed) throw ConfigError("could not place separated blob centers");
  }

  const std::size_t n = spec.n_blobs * spec.points_per_blob + spec.n_noise;
  out.points = Matrix(n, spec.dims);
  out.truth.assign(n, -1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::size_t row = 0;
  for (std::size_t b = 0; b < spec.n_blobs; ++b) {
    const double sigma = spec.spreads.size() == 1 ? spec.spreads.front() : spec.spreads[b];
    for (std::size_t p = 0; p < spec.points_per_blob; ++p, ++row) {
      for (std::size_t k = 0; k < spec.dims; ++k) {
        out.points(row, k) = out.centers(b, k) + sigma * gauss(rng);
      }
      out.truth[row] = static_cast<int>(b);
    }
  }
  const double margin = 0.5 * spec.center_separation;
  std::uniform_real_distribution<double> noise(-margin, box + margin);
  for (std::size_t p = 0; p < spec.n_noise; ++p, ++row) {
    for (std::size_t k = 0; k < spec.dims; ++k) out.points(row, k) = noise(rng);
  }
  return out;
}

tabular::Dataset Blobs::to_dataset() const {
  std::vector<tabular::ColumnSchema> schemas;
  for (std::size_t k = 0; k < points.cols(); ++k) {
    tabular::ColumnSchema s;
    s.name = "x" + std::to_string(k);
    s.kind = tabular::ColumnKind::numerical;
    schemas.push_back(std::move(s));
  }
  std::vector<std::vector<tabular::Cell>> rows;
  std::vector<std::string> ids;
  rows.reserve(points.rows());
  for (std::size_t r = 0; r < points.rows(); ++r) {
    std::vector<tabular::Cell> row;
    for (double v : points.row(r)) row.emplace_back(v);
    rows.push_back(std::move(row));
    ids.push_back(std::to_string(r));
  }
  return tabular::Dataset(std::move(schemas), std::move(rows), std::move(ids));
}

}  // namespace clif::synth
