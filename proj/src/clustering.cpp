#include "aoiv2v/clustering.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aoiv2v {

SimilarityMatrix similarity(const RoadGrid& grid, const std::vector<Vec2>& midpoints,
                            double gamma, double phi) {
  const int k = static_cast<int>(midpoints.size());
  SimilarityMatrix f{k, std::vector<double>(static_cast<std::size_t>(k) * k, 0.0)};
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      const double d = euclidean_distance(grid, midpoints[i], midpoints[j]);
      const double v = d <= phi ? std::exp(-d * d / (gamma * gamma)) : 0.0;
      f.values[static_cast<std::size_t>(i) * k + j] = v;
      f.values[static_cast<std::size_t>(j) * k + i] = v;
    }
  }
  return f;
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

std::vector<int> kmeans(const std::vector<std::vector<double>>& points, int k, Rng& rng,
                        int restarts, int max_iter, double* inertia_out) {
  const int n = static_cast<int>(points.size());
  if (k < 1 || k > n) throw std::invalid_argument("kmeans: need 1 <= k <= number of points");
  const std::size_t dim = points.front().size();
  std::vector<int> best_labels;
  double best_inertia = std::numeric_limits<double>::infinity();
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  for (int run = 0; run < restarts; ++run) {
    // k-means++ seeding.
    std::vector<std::vector<double>> centers;
    centers.push_back(points[std::uniform_int_distribution<int>(0, n - 1)(rng)]);
    std::vector<double> d2(static_cast<std::size_t>(n));
    while (static_cast<int>(centers.size()) < k) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& c : centers) m = std::min(m, sq_dist(points[i], c));
        d2[i] = m;
        total += m;
      }
      int pick = 0;
      if (total > 0) {
        double r = uni(rng) * total;
        for (pick = 0; pick < n - 1; ++pick) {
          r -= d2[pick];
          if (r <= 0 && d2[pick] > 0) break;
        }
        if (d2[pick] <= 0) {
          pick = static_cast<int>(std::max_element(d2.begin(), d2.end()) - d2.begin());
        }
      } else {
        pick = std::uniform_int_distribution<int>(0, n - 1)(rng);
      }
      centers.push_back(points[pick]);
    }

    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    for (int iter = 0; iter < max_iter; ++iter) {
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        int arg = 0;
        double m = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          const double d = sq_dist(points[i], centers[c]);
          if (d < m) {
            m = d;
            arg = c;
          }
        }
        if (labels[i] != arg) {
          labels[i] = arg;
          changed = true;
        }
      }
      // Re-seed empty clusters with the point farthest from its center.
      std::vector<int> counts(static_cast<std::size_t>(k), 0);
      for (int l : labels) ++counts[l];
      for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) continue;
        int far = -1;
        double fd = -1.0;
        for (int i = 0; i < n; ++i) {
          if (counts[labels[i]] <= 1) continue;
          const double d = sq_dist(points[i], centers[labels[i]]);
          if (d > fd) {
            fd = d;
            far = i;
          }
        }
        if (far < 0) break;
        --counts[labels[far]];
        labels[far] = c;
        counts[c] = 1;
        changed = true;
      }
      for (auto& c : centers) std::fill(c.begin(), c.end(), 0.0);
      for (int i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j) centers[labels[i]][j] += points[i][j];
      }
      for (int c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        for (auto& v : centers[c]) v /= counts[c];
      }
      if (!changed) break;
    }
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) inertia += sq_dist(points[i], centers[labels[i]]);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }
  if (inertia_out) *inertia_out = best_inertia;
  return best_labels;
}

SpectralResult spectral_cluster(const SimilarityMatrix& f, int groups, Rng& rng,
                                const SpectralOptions& opts) {
  const int k = f.size;
  if (groups < 2 || groups > k) {
    throw std::invalid_argument("spectral_cluster: need 2 <= groups <= number of pairs");
  }
  Eigen::VectorXd inv_sqrt_deg(k);
  std::vector<bool> isolated(static_cast<std::size_t>(k), false);
  for (int i = 0; i < k; ++i) {
    double deg = 0.0;
    for (int j = 0; j < k; ++j) deg += f(i, j);
    isolated[i] = deg <= 0.0;
    inv_sqrt_deg[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  Eigen::MatrixXd lap(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      lap(i, j) = (i == j ? 1.0 : 0.0) - inv_sqrt_deg[i] * f(i, j) * inv_sqrt_deg[j];
    }
  }
  // Householder tridiagonalization followed by implicit symmetric QR.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("spectral_cluster: eigen decomposition failed");
  }
  SpectralResult out;
  out.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + k);

  std::vector<std::vector<double>> rows(static_cast<std::size_t>(k),
                                        std::vector<double>(static_cast<std::size_t>(groups)));
  for (int i = 0; i < k; ++i) {
    double norm = 0.0;
    for (int c = 0; c < groups; ++c) {
      rows[i][c] = solver.eigenvectors()(i, c);
      norm += rows[i][c] * rows[i][c];
    }
    norm = std::sqrt(norm);
    if (norm > 0) {
      for (auto& v : rows[i]) v /= norm;
    }
  }
  out.labels = kmeans(rows, groups, rng, opts.kmeans_restarts, opts.kmeans_max_iter,
                      &out.inertia);

  // Zero-degree vertices each get a group of their own when one can be freed.
  for (int i = 0; i < k; ++i) {
    if (!isolated[i]) continue;
    std::vector<int> counts(static_cast<std::size_t>(groups), 0);
    for (int l : out.labels) ++counts[l];
    if (counts[out.labels[i]] == 1) continue;
    for (int c = 0; c < groups; ++c) {
      if (counts[c] == 0) {
        out.labels[i] = c;
        break;
      }
    }
  }
  return out;
}

std::vector<std::vector<int>> allocate_rbs(const std::vector<int>& labels, int num_rbs) {
  std::vector<std::vector<int>> rbs(labels.size());
  const int groups = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  for (int g = 0; g < groups; ++g) {
    std::vector<int> members;
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (labels[k] == g) members.push_back(static_cast<int>(k));
    }
    if (members.empty()) continue;
    for (int n = 0; n < num_rbs; ++n) {
      rbs[members[static_cast<std::size_t>(n) % members.size()]].push_back(n);
    }
  }
  return rbs;
}

}  // namespace aoiv2v
