#include "eden/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "eden/parallel.hpp"

namespace eden {

EnergyBreakdown energy(const Vector& v, const Vector& s,
                       const MemorySequence& mems, const EdenParams& params) {
  if (!(params.alpha_s > 0)) {
    throw std::invalid_argument("energy: alpha_s must be > 0");
  }
  const Vector h = hidden_activation(v, s, mems, params);
  EnergyBreakdown e;
  e.state_energy = 0.5 * v.squaredNorm();
  e.interaction_energy = softmax_stats(h).log_sum_exp / params.alpha_s;
  e.total = e.state_energy - e.interaction_energy;
  return e;
}

std::pair<double, double> energy_rate_decomposition(const NetworkState& state,
                                                    const MemorySequence& mems,
                                                    const EdenParams& params) {
  const Observables o = evaluate_observables(state, mems, params, Model::eden);
  return {o.rate_fast, o.rate_slow};
}

FixedPointResult find_fixed_point(const Vector& v0, const Vector& s_frozen,
                                  const MemorySequence& mems,
                                  const EdenParams& params, double tol,
                                  int max_iter) {
  if (!(tol > 0)) throw std::invalid_argument("find_fixed_point: tol must be > 0");
  if (v0.size() != mems.n_features || s_frozen.size() != mems.n_features) {
    throw std::invalid_argument("find_fixed_point: shape mismatch");
  }
  // s is frozen, so its contribution to h is a constant drive.
  const Vector cross = params.alpha_c * [&] {
    const Vector w = mems.xi * s_frozen;
    Vector y(w.size());
    y[0] = w[w.size() - 1];
    y.tail(w.size() - 1) = w.head(w.size() - 1);
    return y;
  }();

  FixedPointResult r;
  r.v_star = v0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector h = params.alpha_s * (mems.xi * r.v_star) + cross;
    const Vector v_next = mems.xi.transpose() * softmax_stats(h).probs;
    r.residual = (v_next - r.v_star).cwiseAbs().maxCoeff();
    r.v_star = v_next;
    r.iterations = it;
    if (r.residual <= tol) {
      r.converged = true;
      break;
    }
  }
  r.nearest_memory = argmax_memory(r.v_star, mems);
  return r;
}

std::vector<FixedPointResult> track_fixed_points(const Trajectory& traj,
                                                 const MemorySequence& mems,
                                                 const EdenParams& params,
                                                 int stride, double tol,
                                                 int max_iter, int jobs) {
  if (traj.samples.empty()) {
    throw std::invalid_argument("track_fixed_points: empty trajectory");
  }
  if (stride < 1) throw std::invalid_argument("track_fixed_points: stride must be >= 1");

  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < traj.samples.size(); i += stride) picks.push_back(i);

  std::vector<FixedPointResult> out(picks.size());
  parallel_for(picks.size(), jobs, [&](std::size_t k) {
    const auto& sample = traj.samples[picks[k]];
    out[k] = find_fixed_point(sample.v, sample.s, mems, params, tol, max_iter);
    out[k].t = sample.t;
  });
  return out;
}

Pc1Result principal_component_1(const std::vector<Vector>& points) {
  if (points.size() < 2) {
    throw std::invalid_argument("principal_component_1: need at least 2 points");
  }
  const auto n = points.size();
  const Eigen::Index dim = points[0].size();
  Vector mean = Vector::Zero(dim);
  for (const auto& p : points) {
    if (p.size() != dim) {
      throw std::invalid_argument("principal_component_1: inconsistent dimensions");
    }
    mean += p;
  }
  mean /= static_cast<double>(n);

  Matrix centered(n, dim);
  for (std::size_t i = 0; i < n; ++i) centered.row(i) = (points[i] - mean).transpose();

  Pc1Result r;
  r.scores.assign(n, 0.0);
  if (centered.cwiseAbs().maxCoeff() < 1e-14) {  // degenerate: all points equal
    r.direction = Vector::Zero(dim);
    r.direction[0] = 1.0;
    return r;
  }

  // Power iteration on C = centered^T centered / n without forming C.
  Eigen::Index seed_row;
  centered.rowwise().squaredNorm().maxCoeff(&seed_row);
  Vector x = centered.row(seed_row).transpose().normalized();
  constexpr double kTol = 1e-10;
  for (int it = 0; it < 100000; ++it) {
    Vector y = centered.transpose() * (centered * x) / static_cast<double>(n);
    const double norm = y.norm();
    if (norm == 0.0) break;
    y /= norm;
    if (y.dot(x) < 0) y = -y;  // fix the sign flip ambiguity between iterates
    const double delta = (y - x).cwiseAbs().maxCoeff();
    x = y;
    if (delta <= kTol) break;
  }
  r.direction = x;
  for (std::size_t i = 0; i < n; ++i) r.scores[i] = centered.row(i).dot(x.transpose());
  for (double sc : r.scores) {
    if (sc != 0.0) {
      if (sc < 0) {
        r.direction = -r.direction;
        for (double& s : r.scores) s = -s;
      }
      break;
    }
  }
  return r;
}

}  // namespace eden
