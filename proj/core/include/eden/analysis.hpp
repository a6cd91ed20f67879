#pragma once

#include <cstdint>
#include <vector>

#include "eden/dynamics.hpp"
#include "eden/patterns.hpp"

namespace eden {

/// One completed stay in a memory state. Times are in tau_f units, so
/// duration = exit_time - enter_time holds as written.
struct EscapeRecord {
  int memory_index = 0;  // 0-based
  double enter_time = 0.0;
  double exit_time = 0.0;
  double duration = 0.0;
};

/// Segments the trajectory's argmax series into maximal constant runs and
/// returns the interior ones; the first run (cue transient) and the last
/// (cut by t_max) are censored. A trajectory with no complete run yields an
/// empty list; use escape_summary to distinguish that from a static regime.
std::vector<EscapeRecord> measure_escape_times(const Trajectory& traj,
                                               const MemorySequence& mems);

struct EscapeSummary {
  std::vector<EscapeRecord> records;
  int n_switches = 0;          // argmax changes observed
  int n_complete = 0;          // records.size()
  double mean_duration = 0.0;  // tau_f units; NaN when no complete runs
  bool censored = false;       // true when nothing but censored runs exist
};

EscapeSummary summarize_escapes(const Trajectory& traj, const MemorySequence& mems);

/// <t_e> = -(tau_d/tau_f) ln(1 - sqrt(alpha_s/alpha_c)) in tau_f units;
/// +infinity when alpha_s/alpha_c >= 1 (static regime). All arguments must
/// be positive.
double analytic_escape_time(double alpha_s, double alpha_c, double tau_d,
                            double tau_f);

/// lambda = sqrt(alpha_s/alpha_c): the fraction of the previous pattern
/// still present in the slow state when a transition fires. Defined for
/// 0 < alpha_s <= alpha_c.
double transition_lambda(double alpha_s, double alpha_c);

/// Closed-form slow state between transitions:
/// s(t) = lambda e^{-t/tau} xi_prev + (1 - e^{-t/tau}) xi_curr,
/// with t and tau = tau_d/tau_f in tau_f units.
Vector slow_trajectory_analytic(double lambda, const Vector& xi_prev,
                                const Vector& xi_curr, double tau_ratio,
                                double t);

struct PhaseCell {
  double ratio_alpha = 0.0;  // alpha_s / alpha_c
  double ratio_tau = 0.0;    // tau_d / tau_f
  double analytic_te = 0.0;  // +inf in the static regime
  double empirical_te = 0.0; // NaN when not simulated or censored
  int n_transitions = 0;     // complete runs pooled over seeds
  bool censored = false;
  bool is_static = false;    // ratio_alpha >= 1
  bool diverged = false;
};

struct PhaseOptions {
  int n_features = 100;
  int n_memories = 5;
  std::uint64_t seed = 1;
  int seed_pool = 1;       // simulations pooled per cell (seed, seed+1, ...)
  double alpha_c = 1.0;
  double tau_f = 1.0;
  double dt = 0.01;
  bool simulate = true;    // false: analytic-only sweep
  double t_max_override = 0.0;  // >0 forces the per-cell horizon
  double t_max_cap = 1e5;       // default cap in tau_f units
  int jobs = 0;
};

/// Sweeps the (alpha_s/alpha_c, tau_d/tau_f) grid. Each cell gets the
/// analytic escape time and, when options.simulate, a pooled empirical mean
/// from integrate + measure_escape_times (cue protocol v0 = xi^(1), s0 = 0).
/// Per-cell divergence is recorded, never thrown. Cells run concurrently and
/// are returned in row-major grid order.
std::vector<PhaseCell> phase_diagram(const std::vector<double>& ratio_alpha_grid,
                                     const std::vector<double>& ratio_tau_grid,
                                     const PhaseOptions& options);

}  // namespace eden
