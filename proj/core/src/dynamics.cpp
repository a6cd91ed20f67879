#include "eden/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace eden {

void EdenParams::validate() const {
  if (!(alpha_s >= 0) || !(alpha_c >= 0)) {
    throw std::invalid_argument("EdenParams: interaction strengths must be >= 0");
  }
  if (!(tau_f > 0) || !(tau_d > 0) || !(dt > 0)) {
    throw std::invalid_argument("EdenParams: timescales and dt must be strictly positive");
  }
  if (!(t_max >= 0)) {
    throw std::invalid_argument("EdenParams: t_max must be non-negative");
  }
  if (dt > tau_f / 10.0 + 1e-15) {
    throw std::invalid_argument("EdenParams: dt must not exceed tau_f/10");
  }
}

DivergenceError::DivergenceError(std::size_t step_, double t_)
    : std::runtime_error("state diverged at step " + std::to_string(step_) +
                         " (t=" + std::to_string(t_) + ")"),
      step(step_),
      t(t_) {}

SoftmaxResult softmax_stats(const Vector& h) {
  SoftmaxResult r;
  const double m = h.maxCoeff();
  r.probs = (h.array() - m).exp();
  const double z = r.probs.sum();
  r.probs /= z;
  r.log_sum_exp = m + std::log(z);
  return r;
}

Vector softmax(const Vector& h) { return softmax_stats(h).probs; }

namespace {

Vector shift_to_successor(const Vector& w) {
  // y_mu = w_{mu-1} with circular wrap; turns <xi^(k), s> indexed by k into
  // the cross-drive <xi^(mu-1), s> indexed by mu.
  const Eigen::Index p = w.size();
  Vector y(p);
  y[0] = w[p - 1];
  y.tail(p - 1) = w.head(p - 1);
  return y;
}

void check_shapes(const Vector& v, const Vector& s, const MemorySequence& mems,
                  const char* who) {
  if (v.size() != mems.n_features || s.size() != mems.n_features) {
    throw std::invalid_argument(std::string(who) + ": state/memory shape mismatch");
  }
}

}  // namespace

Vector hidden_activation(const Vector& v, const Vector& s,
                         const MemorySequence& mems, const EdenParams& params) {
  check_shapes(v, s, mems, "hidden_activation");
  return params.alpha_s * (mems.xi * v) +
         params.alpha_c * shift_to_successor(mems.xi * s);
}

Derivative eden_derivative(const NetworkState& state, const MemorySequence& mems,
                           const EdenParams& params) {
  check_shapes(state.v, state.s, mems, "eden_derivative");
  const Vector h = hidden_activation(state.v, state.s, mems, params);
  const Vector p = softmax_stats(h).probs;
  Derivative d;
  d.dv = (mems.xi.transpose() * p - state.v) / params.tau_f;
  d.ds = (state.v - state.s) / params.tau_d;
  return d;
}

double clamp_sigma(double x) {
  if (x < -1.0) return -1.0;
  if (x > 1.0) return 1.0;
  return x;
}

Derivative reference_derivative(const NetworkState& state,
                                const MemorySequence& mems,
                                const EdenParams& params) {
  check_shapes(state.v, state.s, mems, "reference_derivative");
  const Vector sig_v = state.v.unaryExpr([](double x) { return clamp_sigma(x); });
  const Vector drive = params.alpha_s * (mems.xi * sig_v) +
                       params.alpha_c * shift_to_successor(mems.xi * state.s);
  Derivative d;
  d.dv = (mems.xi.transpose() * drive - state.v) / params.tau_f;
  d.ds = (state.v - state.s) / params.tau_d;
  return d;
}

Observables evaluate_observables(const NetworkState& state,
                                 const MemorySequence& mems,
                                 const EdenParams& params, Model model) {
  check_shapes(state.v, state.s, mems, "evaluate_observables");
  Observables o;
  const Vector u = mems.xi * state.v;
  o.m_v = u / mems.n_features;
  o.m_s = (mems.xi * state.s) / mems.n_features;
  u.maxCoeff(&o.argmax);
  if (model == Model::eden) {
    const Vector h = params.alpha_s * u +
                     params.alpha_c * shift_to_successor(mems.xi * state.s);
    const SoftmaxResult sm = softmax_stats(h);
    o.probs = sm.probs;
    o.state_energy = 0.5 * state.v.squaredNorm();
    // the energy normalization needs alpha_s > 0; report NaN in the
    // switched-off limit rather than dividing by zero
    o.interaction_energy =
        params.alpha_s > 0 ? sm.log_sum_exp / params.alpha_s
                           : std::numeric_limits<double>::quiet_NaN();
    o.energy = o.state_energy - o.interaction_energy;
    const Vector dv = (mems.xi.transpose() * sm.probs - state.v) / params.tau_f;
    const Vector ds = (state.v - state.s) / params.tau_d;
    o.rate_fast = -params.tau_f * dv.squaredNorm();
    o.rate_slow = -(params.alpha_c / params.alpha_s) *
                  sm.probs.dot(shift_to_successor(mems.xi * ds));
  } else {
    o.state_energy = o.interaction_energy = o.energy =
        std::numeric_limits<double>::quiet_NaN();
    o.rate_fast = o.rate_slow = std::numeric_limits<double>::quiet_NaN();
  }
  return o;
}

Trajectory integrate(const NetworkState& initial, const MemorySequence& mems,
                     const EdenParams& params, int record_stride, Model model) {
  params.validate();
  check_shapes(initial.v, initial.s, mems, "integrate");
  if (record_stride < 1) {
    throw std::invalid_argument("integrate: record_stride must be >= 1");
  }

  Trajectory traj;
  traj.params = params;
  traj.model = model;
  traj.record_stride = record_stride;
  traj.n_features = mems.n_features;
  traj.n_memories = mems.n_memories;
  traj.pattern_seed = mems.seed;

  const auto n_steps =
      static_cast<std::size_t>(std::floor(params.t_max / params.dt + 1e-9));
  traj.samples.reserve(n_steps / record_stride + 2);
  traj.observables.reserve(n_steps / record_stride + 2);

  NetworkState state = initial;
  for (std::size_t k = 0;; ++k) {
    state.t = initial.t + static_cast<double>(k) * params.dt;
    if (!state.v.allFinite() || !state.s.allFinite() ||
        state.v.cwiseAbs().maxCoeff() > 10.0) {
      throw DivergenceError(k, state.t);
    }
    if (k % static_cast<std::size_t>(record_stride) == 0) {
      traj.samples.push_back({state.t, state.v, state.s});
      traj.observables.push_back(evaluate_observables(state, mems, params, model));
    }
    if (k == n_steps) break;
    const Derivative d = model == Model::eden
                             ? eden_derivative(state, mems, params)
                             : reference_derivative(state, mems, params);
    state.v += params.dt * d.dv;
    state.s += params.dt * d.ds;
  }
  return traj;
}

}  // namespace eden
