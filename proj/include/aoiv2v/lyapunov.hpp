#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace aoiv2v {

/// Virtual queues backing the four time-average constraints: mean excess
/// (x), second moment of excess (y), rate stability (r) and the
/// rate-weighted violation frequency (q).
struct VirtualQueues {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
  double q = 0.0;
};

/// Weight of the rate term in the per-slot objective, periodic arrivals.
/// `rate_scale` is tau*omega/Z. With `tail_terms` false the excess-related
/// terms vX + (2vY+1)(Q+psi) + 2(Q+psi)^3 are dropped (no-EVT baseline).
double weight_d(const VirtualQueues& vq, double queue, double packets_per_slot, double psi,
                double epsilon_k, bool indicator, double rate_scale, bool tail_terms = true);

/// Weight for Poisson arrivals; `arrivals` is this slot's A_k(t).
double weight_m(const VirtualQueues& vq, double queue, double arrivals, double e_k,
                bool indicator, double rate_scale, bool tail_terms = true);

struct PowerAllocation {
  std::vector<double> powers;  // W per allocated RB
  double zeta = 0.0;           // budget multiplier
};

/// Minimizes sum_n V P_n - w log2(1 + P_n h_n / noise) s.t. sum P_n <= p_max.
/// Budget-tight whenever V = 0 and w > 0.
PowerAllocation waterfill(double weight, std::span<const double> gains, double v, double p_max,
                          double noise_plus_i0);

/// Same problem with a per-RB linear price: sum_n c_n P_n - w log2(...).
/// A price of +infinity pins that RB at zero power.
PowerAllocation waterfill_priced(double weight, std::span<const double> gains,
                                 std::span<const double> prices, double p_max,
                                 double noise_plus_i0);

double p1_objective(std::span<const double> powers, std::span<const double> gains,
                    double weight, double v, double noise_plus_i0);

/// Finite-blocklength objective: P1 plus w/sqrt(L) log2(e) Q^-1(eps)
/// sqrt(rho(2+rho))/(1+rho) per RB.
double p2_objective(std::span<const double> powers, std::span<const double> gains,
                    double weight, double v, double noise_plus_i0, std::int64_t blocklength,
                    double block_error);

struct CcpOptions {
  double tolerance = 1e-6;  // relative objective improvement
  int max_iter = 30;
};

struct CcpResult {
  std::vector<double> powers;
  std::vector<double> objective_history;  // P2 objective after each iterate, x0 first
  int iterations = 0;
  bool converged = false;
};

/// Convex-concave procedure: linearize the dispersion penalty at the
/// current point and re-solve the priced water-filling problem.
/// `start` defaults to the uniform split p_max / |N_k|.
CcpResult ccp_solve(double weight, std::span<const double> gains, double v, double p_max,
                    double noise_plus_i0, std::int64_t blocklength, double block_error,
                    const CcpOptions& opts = {}, std::span<const double> start = {});

/// Virtual-queue recursions, periodic arrivals. With `track_excess` false
/// vX and vY stay frozen.
VirtualQueues update_vq_d(const VirtualQueues& vq, double queue, double rate,
                          double packets_per_slot, double psi, double h_cap, double b_cap,
                          double epsilon_k, bool track_excess = true);

/// Virtual-queue recursions, Poisson arrivals.
VirtualQueues update_vq_m(const VirtualQueues& vq, double queue, double rate,
                          double arrivals, double h_cap, double b_cap, double e_k,
                          bool track_excess = true);

}  // namespace aoiv2v
