#include "aoiv2v/evt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace aoiv2v {

double gpd_cdf(double x, const GpdParams& p) {
  if (x <= 0) return 0.0;
  if (std::abs(p.xi) < kGpdXiZero) return -std::expm1(-x / p.sigma);
  const double base = 1.0 + p.xi * x / p.sigma;
  if (base <= 0) return 1.0;
  return 1.0 - std::pow(base, -1.0 / p.xi);
}

double gpd_ccdf(double x, const GpdParams& p) {
  if (x <= 0) return 1.0;
  if (std::abs(p.xi) < kGpdXiZero) return std::exp(-x / p.sigma);
  const double base = 1.0 + p.xi * x / p.sigma;
  if (base <= 0) return 0.0;
  return std::pow(base, -1.0 / p.xi);
}

double gpd_sample(Rng& rng, const GpdParams& p) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double u = uni(rng);
  while (u <= 0.0) u = uni(rng);
  if (std::abs(p.xi) < kGpdXiZero) return -p.sigma * std::log(u);
  return p.sigma / p.xi * std::expm1(-p.xi * std::log(u));
}

GpdMoments gpd_moments(const GpdParams& p) {
  const double a = 1.0 - p.xi;
  return {p.sigma / a, p.sigma * p.sigma / (a * a * (1.0 - 2.0 * p.xi))};
}

ExcessCaps hb_caps(double sigma_th, double xi_th) {
  return {sigma_th / (1.0 - xi_th),
          2.0 * sigma_th * sigma_th / ((1.0 - xi_th) * (1.0 - 2.0 * xi_th))};
}

namespace {

constexpr double kXiLower = -1.0;
constexpr double kXiUpper = 0.499;
constexpr double kXiSeries = 1e-5;
constexpr double kInf = std::numeric_limits<double>::infinity();

using Vec = std::array<double, 2>;  // (log sigma, xi)

struct Objective {
  std::span<const double> x;

  // Negative log-likelihood and its gradient in (log sigma, xi).
  double value(const Vec& t, Vec* grad) const {
    const double sigma = std::exp(t[0]);
    const double xi = t[1];
    const double n = static_cast<double>(x.size());
    double f = n * t[0];
    double g0 = n;
    double g1 = 0.0;
    if (std::abs(xi) < kXiSeries) {
      for (double xv : x) {
        const double y = xv / sigma;
        const double y2 = y * y;
        f += y + xi * (y - y2 / 2) + xi * xi * (y2 * y / 3 - y2 / 2);
        g0 -= y * (1.0 + xi) / (1.0 + xi * y);
        g1 += (y - y2 / 2) + 2 * xi * (y2 * y / 3 - y2 / 2);
      }
    } else {
      double sum_log = 0.0;
      double sum_ratio = 0.0;
      for (double xv : x) {
        const double y = xv / sigma;
        const double z = xi * y;
        if (1.0 + z <= 0.0) return kInf;
        sum_log += std::log1p(z);
        sum_ratio += y / (1.0 + z);
      }
      f += (1.0 + 1.0 / xi) * sum_log;
      g0 -= (1.0 + xi) * sum_ratio;
      g1 = -sum_log / (xi * xi) + (1.0 + 1.0 / xi) * sum_ratio;
    }
    if (grad) *grad = {g0, g1};
    return f;
  }
};

Vec project(Vec t) {
  t[1] = std::clamp(t[1], kXiLower, kXiUpper);
  return t;
}

struct Run {
  Vec theta;
  double f;
  int iterations;
  bool converged;
};

Run minimize(const Objective& obj, Vec theta) {
  theta = project(theta);
  Vec g{};
  double f = obj.value(theta, &g);
  std::array<std::array<double, 2>, 2> H{{{1.0, 0.0}, {0.0, 1.0}}};
  const double scale = 1.0 / std::max(1.0, static_cast<double>(obj.x.size()));
  H = {{{scale, 0.0}, {0.0, scale}}};
  int it = 0;
  bool converged = false;
  for (; it < 500; ++it) {
    const bool at_lower = theta[1] <= kXiLower && g[1] > 0;
    const bool at_upper = theta[1] >= kXiUpper && g[1] < 0;
    const bool active = at_lower || at_upper;
    Vec d{-(H[0][0] * g[0] + H[0][1] * g[1]), -(H[1][0] * g[0] + H[1][1] * g[1])};
    if (active) d = {-H[0][0] * g[0], 0.0};
    double slope = d[0] * g[0] + d[1] * g[1];
    if (!(slope < 0)) {
      H = {{{scale, 0.0}, {0.0, scale}}};
      d = {-scale * g[0], active ? 0.0 : -scale * g[1]};
      slope = d[0] * g[0] + d[1] * g[1];
    }
    const double pg = std::abs(g[0]) + (active ? 0.0 : std::abs(g[1]));
    if (pg < 1e-9 * static_cast<double>(obj.x.size())) {
      converged = true;
      break;
    }
    double step = 1.0;
    Vec next{};
    Vec g_next{};
    double f_next = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      next = project({theta[0] + step * d[0], theta[1] + step * d[1]});
      f_next = obj.value(next, &g_next);
      const double decrease =
          g[0] * (next[0] - theta[0]) + g[1] * (next[1] - theta[1]);
      if (std::isfinite(f_next) && f_next <= f + 1e-4 * decrease) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = true;  // no further progress possible at working precision
      break;
    }
    const Vec s{next[0] - theta[0], next[1] - theta[1]};
    const Vec y{g_next[0] - g[0], g_next[1] - g[1]};
    const double sy = s[0] * y[0] + s[1] * y[1];
    const double df = f - f_next;
    theta = next;
    g = g_next;
    f = f_next;
    if (sy > 1e-14) {
      // Inverse BFGS update.
      const double rho = 1.0 / sy;
      const double Hy0 = H[0][0] * y[0] + H[0][1] * y[1];
      const double Hy1 = H[1][0] * y[0] + H[1][1] * y[1];
      const double yHy = y[0] * Hy0 + y[1] * Hy1;
      const std::array<double, 2> Hy{Hy0, Hy1};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          H[i][j] += -rho * (Hy[i] * s[j] + s[i] * Hy[j]) + (rho * rho * yHy + rho) * s[i] * s[j];
        }
      }
    }
    if (df >= 0 && df < 1e-13 * (1.0 + std::abs(f))) {
      converged = true;
      ++it;
      break;
    }
  }
  return {theta, f, it, converged};
}

}  // namespace

double gpd_log_likelihood(std::span<const double> excesses, const GpdParams& p) {
  Objective obj{excesses};
  return -obj.value({std::log(p.sigma), p.xi}, nullptr);
}

GpdFit fit_gpd(std::span<const double> excesses) {
  if (excesses.size() < kGpdMinSamples) {
    throw std::invalid_argument("fit_gpd: need at least 30 samples");
  }
  double xmax = 0.0;
  for (double v : excesses) {
    if (!(v >= 0) || !std::isfinite(v)) {
      throw std::invalid_argument("fit_gpd: samples must be finite and >= 0");
    }
    xmax = std::max(xmax, v);
  }
  const double n = static_cast<double>(excesses.size());
  const double mean = std::accumulate(excesses.begin(), excesses.end(), 0.0) / n;
  double var = 0.0;
  for (double v : excesses) var += (v - mean) * (v - mean);
  var /= (n - 1.0);
  if (!(var > 0) || !(mean > 0)) {
    throw std::invalid_argument("fit_gpd: degenerate sample (no spread)");
  }

  // Method of moments: mean^2/var = 1 - 2 xi.
  const double ratio = mean * mean / var;
  double xi0 = std::clamp(0.5 * (1.0 - ratio), -0.9, 0.45);
  double sigma0 = mean * (1.0 - xi0);
  if (xi0 < 0) sigma0 = std::max(sigma0, -xi0 * xmax * 1.01);

  const Objective obj{excesses};
  const std::array<Vec, 2> starts{Vec{std::log(sigma0), xi0}, Vec{std::log(mean), 0.0}};
  Run best{{0, 0}, kInf, 0, false};
  for (const Vec& s : starts) {
    const Run r = minimize(obj, s);
    if (r.f < best.f) best = r;
  }
  GpdFit fit;
  fit.params = {std::exp(best.theta[0]), best.theta[1]};
  fit.log_likelihood = -best.f;
  fit.iterations = best.iterations;
  fit.converged = best.converged;
  return fit;
}

double ks_distance(std::span<const double> samples, const GpdParams& p) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = gpd_cdf(s[i], p);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace aoiv2v
