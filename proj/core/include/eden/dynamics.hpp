#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "eden/patterns.hpp"

namespace eden {

/// Two-timescale integration parameters. Timescales and dt are strictly
/// positive and dt must resolve the fast timescale (dt <= tau_f/10);
/// either interaction strength may be zero to switch that coupling off
/// (alpha_c = 0 is the static associative-memory limit).
struct EdenParams {
  double alpha_s = 0.98;  // self-interaction strength
  double alpha_c = 1.0;   // cross-interaction strength
  double tau_f = 1.0;     // fast timescale
  double tau_d = 20.0;    // slow timescale
  double dt = 0.01;       // Euler step
  double t_max = 600.0;   // integration horizon (t_max = 0 records only t=0)

  void validate() const;
};

struct NetworkState {
  Vector v;  // fast feature neurons
  Vector s;  // slow neurons
  double t = 0.0;
};

enum class Model { eden, reference };

/// Thrown when the state leaves the sane region (|v_i| > 10 or non-finite);
/// bounded attractors make this a bug signal, not physics.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t step, double t);
  std::size_t step;
  double t;
};

struct SoftmaxResult {
  Vector probs;
  double log_sum_exp;
};

/// Numerically stable softmax + log-sum-exp over the same shifted kernel,
/// so energies and dynamics always agree. probs sum to 1 within 1e-12.
SoftmaxResult softmax_stats(const Vector& h);
Vector softmax(const Vector& h);

/// Hidden activations h_mu = alpha_s <xi^(mu), v> + alpha_c <xi^(mu-1), s>,
/// with the predecessor index wrapping circularly.
Vector hidden_activation(const Vector& v, const Vector& s,
                         const MemorySequence& mems, const EdenParams& params);

struct Derivative {
  Vector dv;
  Vector ds;
};

/// dv_i = (sum_mu xi^(mu)_i softmax(h)_mu - v_i)/tau_f,
/// ds_i = (v_i - s_i)/tau_d.
Derivative eden_derivative(const NetworkState& state, const MemorySequence& mems,
                           const EdenParams& params);

/// Clamp nonlinearity of the reference network: identity on [-1,1],
/// saturating at +-1 outside.
double clamp_sigma(double x);

/// Reference linear-interaction network:
/// dv_i = (alpha_s sum_{mu,j} xi^(mu)_i xi^(mu)_j sigma(v_j)
///        + alpha_c sum_{mu,j} xi^(mu)_i xi^(mu-1)_j s_j - v_i)/tau_f,
/// ds as in the softmax network.
Derivative reference_derivative(const NetworkState& state,
                                const MemorySequence& mems,
                                const EdenParams& params);

/// Per-sample derived observables. For the reference model the energy
/// fields are NaN (its energy is not part of this library's contract).
struct Observables {
  Vector m_v;      // overlaps of v with each memory
  Vector m_s;      // overlaps of s with each memory
  Vector probs;    // softmax weights (eden model only)
  double state_energy = 0.0;
  double interaction_energy = 0.0;
  double energy = 0.0;
  double rate_fast = 0.0;  // F, never positive
  double rate_slow = 0.0;  // S
  int argmax = 0;          // 0-based memory index
};

struct TrajectorySample {
  double t = 0.0;
  Vector v;
  Vector s;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<Observables> observables;
  EdenParams params;
  Model model = Model::eden;
  int record_stride = 1;
  // provenance of the memory set used
  int n_features = 0;
  int n_memories = 0;
  std::uint64_t pattern_seed = 0;

  std::size_t size() const { return samples.size(); }
};

/// Forward-Euler integration, recording every record_stride-th step
/// (including step 0). Observables are evaluated at recorded samples.
Trajectory integrate(const NetworkState& initial, const MemorySequence& mems,
                     const EdenParams& params, int record_stride = 10,
                     Model model = Model::eden);

/// Observables of a single state; the same evaluation integrate() records.
Observables evaluate_observables(const NetworkState& state,
                                 const MemorySequence& mems,
                                 const EdenParams& params,
                                 Model model = Model::eden);

}  // namespace eden
