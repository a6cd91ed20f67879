#pragma once

#include <utility>
#include <vector>

#include "eden/dynamics.hpp"
#include "eden/patterns.hpp"

namespace eden {

struct EnergyBreakdown {
  double state_energy = 0.0;        // sum v_i^2 / 2
  double interaction_energy = 0.0;  // log-sum-exp term / alpha_s
  double total = 0.0;               // state_energy - interaction_energy
};

/// E(v) = sum_i v_i^2/2 - (1/alpha_s) log sum_mu exp(h_mu), with h from
/// hidden_activation and a max-subtracted log-sum-exp.
EnergyBreakdown energy(const Vector& v, const Vector& s,
                       const MemorySequence& mems, const EdenParams& params);

/// Splits dE/dt along a trajectory into the fast term
/// F = -tau_f sum_i (dv_i/dt)^2 (never positive) and the slow term
/// S = -(alpha_c/alpha_s) sum_{i,mu} softmax(h)_mu xi^(mu-1)_i ds_i/dt,
/// so that dE/dt = F + S.
std::pair<double, double> energy_rate_decomposition(const NetworkState& state,
                                                    const MemorySequence& mems,
                                                    const EdenParams& params);

struct FixedPointResult {
  Vector v_star;
  double residual = 0.0;  // sup-norm displacement of the final update
  int iterations = 0;
  bool converged = false;
  int nearest_memory = 0;  // 0-based
  double t = 0.0;          // sample time when produced by track_fixed_points
};

/// Iterates the frozen-s update map v <- sum_mu xi^(mu) softmax(h(v, s))_mu,
/// whose fixed points are exactly the zeros of dv/dt with s held constant.
/// Non-convergence is reported through converged=false, not thrown.
FixedPointResult find_fixed_point(const Vector& v0, const Vector& s_frozen,
                                  const MemorySequence& mems,
                                  const EdenParams& params, double tol = 1e-8,
                                  int max_iter = 10000);

/// Runs find_fixed_point at every stride-th recorded sample, seeded at the
/// recorded v with s frozen at the recorded s. Samples are independent and
/// processed concurrently; results come back in sample order.
std::vector<FixedPointResult> track_fixed_points(const Trajectory& traj,
                                                 const MemorySequence& mems,
                                                 const EdenParams& params,
                                                 int stride, double tol = 1e-8,
                                                 int max_iter = 10000,
                                                 int jobs = 0);

struct Pc1Result {
  Vector direction;            // unit norm; first nonzero score is positive
  std::vector<double> scores;  // centered projections
};

/// Leading principal component by power iteration (tolerance 1e-10).
/// Degenerate input (all points equal) returns the first basis vector and
/// zero scores.
Pc1Result principal_component_1(const std::vector<Vector>& points);

}  // namespace eden
