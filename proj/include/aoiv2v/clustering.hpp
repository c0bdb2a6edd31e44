#pragma once

#include <cstdint>
#include <vector>

#include "aoiv2v/mobility.hpp"
#include "aoiv2v/rng.hpp"

namespace aoiv2v {

/// Dense symmetric K x K matrix, row-major.
struct SimilarityMatrix {
  int size = 0;
  std::vector<double> values;

  double operator()(int i, int j) const {
    return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(size) +
                  static_cast<std::size_t>(j)];
  }
};

/// f_kk' = exp(-d^2 / gamma^2) when d <= phi, else 0 (torus distances).
SimilarityMatrix similarity(const RoadGrid& grid, const std::vector<Vec2>& midpoints,
                            double gamma, double phi);

struct SpectralOptions {
  int kmeans_restarts = 20;
  int kmeans_max_iter = 100;
};

struct SpectralResult {
  std::vector<int> labels;           // group id per pair, in [0, groups)
  std::vector<double> eigenvalues;   // ascending spectrum of I - D^-1/2 F D^-1/2
  double inertia = 0.0;
};

/// Normalized spectral clustering into `groups` groups. A vertex of zero
/// degree gets a zero row in D^-1/2 and its own group. Throws
/// std::invalid_argument unless 2 <= groups <= K.
SpectralResult spectral_cluster(const SimilarityMatrix& f, int groups, Rng& rng,
                                const SpectralOptions& opts = {});

/// k-means with k-means++ seeding; the best of `restarts` runs by inertia.
/// Every cluster is non-empty when there are at least k distinct points.
std::vector<int> kmeans(const std::vector<std::vector<double>>& points, int k, Rng& rng,
                        int restarts, int max_iter, double* inertia = nullptr);

/// Per-pair RB lists. Within each group RBs are dealt round-robin in
/// increasing pair order; every group reuses the whole pool.
std::vector<std::vector<int>> allocate_rbs(const std::vector<int>& labels, int num_rbs);

inline bool should_recluster(std::int64_t slot, int t0) { return slot % t0 == 0; }

}  // namespace aoiv2v
