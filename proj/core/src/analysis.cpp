#include "eden/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eden/parallel.hpp"

namespace eden {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

std::vector<EscapeRecord> measure_escape_times(const Trajectory& traj,
                                               const MemorySequence& mems) {
  return summarize_escapes(traj, mems).records;
}

EscapeSummary summarize_escapes(const Trajectory& traj, const MemorySequence&) {
  if (traj.observables.empty()) {
    throw std::invalid_argument("measure_escape_times: empty trajectory");
  }
  EscapeSummary sum;
  const double tf = traj.params.tau_f;

  struct Run {
    int memory;
    double start;
    double end;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const int a = traj.observables[i].argmax;
    const double t = traj.samples[i].t / tf;
    if (runs.empty() || runs.back().memory != a) {
      if (!runs.empty()) runs.back().end = t;
      runs.push_back({a, t, t});
      if (runs.size() > 1) ++sum.n_switches;
    }
  }
  runs.back().end = traj.samples.back().t / tf;

  for (std::size_t k = 1; k + 1 < runs.size(); ++k) {
    EscapeRecord rec;
    rec.memory_index = runs[k].memory;
    rec.enter_time = runs[k].start;
    rec.exit_time = runs[k].end;
    rec.duration = rec.exit_time - rec.enter_time;
    sum.records.push_back(rec);
  }
  sum.n_complete = static_cast<int>(sum.records.size());
  if (sum.records.empty()) {
    sum.censored = true;
    sum.mean_duration = kNaN;
  } else {
    double acc = 0.0;
    for (const auto& r : sum.records) acc += r.duration;
    sum.mean_duration = acc / sum.records.size();
  }
  return sum;
}

double analytic_escape_time(double alpha_s, double alpha_c, double tau_d,
                            double tau_f) {
  if (!(alpha_s > 0) || !(alpha_c > 0) || !(tau_d > 0) || !(tau_f > 0)) {
    throw std::invalid_argument("analytic_escape_time: arguments must be positive");
  }
  const double r = alpha_s / alpha_c;
  if (r >= 1.0) return kInf;
  return -(tau_d / tau_f) * std::log1p(-std::sqrt(r));
}

double transition_lambda(double alpha_s, double alpha_c) {
  if (!(alpha_s > 0) || !(alpha_c > 0)) {
    throw std::invalid_argument("transition_lambda: arguments must be positive");
  }
  if (alpha_s > alpha_c) {
    throw std::invalid_argument(
        "transition_lambda: alpha_s > alpha_c has no transitions, lambda undefined");
  }
  return std::sqrt(alpha_s / alpha_c);
}

Vector slow_trajectory_analytic(double lambda, const Vector& xi_prev,
                                const Vector& xi_curr, double tau_ratio,
                                double t) {
  if (!(t >= 0)) throw std::invalid_argument("slow_trajectory_analytic: t must be >= 0");
  if (!(tau_ratio > 0)) {
    throw std::invalid_argument("slow_trajectory_analytic: tau_ratio must be > 0");
  }
  if (xi_prev.size() != xi_curr.size()) {
    throw std::invalid_argument("slow_trajectory_analytic: shape mismatch");
  }
  const double decay = std::exp(-t / tau_ratio);
  return lambda * decay * xi_prev + (1.0 - decay) * xi_curr;
}

std::vector<PhaseCell> phase_diagram(const std::vector<double>& ratio_alpha_grid,
                                     const std::vector<double>& ratio_tau_grid,
                                     const PhaseOptions& options) {
  if (ratio_alpha_grid.empty() || ratio_tau_grid.empty()) {
    throw std::invalid_argument("phase_diagram: grids must be non-empty");
  }
  for (double ra : ratio_alpha_grid) {
    if (!(ra > 0)) throw std::invalid_argument("phase_diagram: ratio_alpha must be > 0");
  }
  for (double rt : ratio_tau_grid) {
    if (!(rt > 0)) throw std::invalid_argument("phase_diagram: ratio_tau must be > 0");
  }
  if (options.seed_pool < 1) {
    throw std::invalid_argument("phase_diagram: seed_pool must be >= 1");
  }

  std::vector<PhaseCell> cells(ratio_alpha_grid.size() * ratio_tau_grid.size());
  const auto n_tau = ratio_tau_grid.size();

  parallel_for(cells.size(), options.jobs, [&](std::size_t idx) {
    PhaseCell& cell = cells[idx];
    cell.ratio_alpha = ratio_alpha_grid[idx / n_tau];
    cell.ratio_tau = ratio_tau_grid[idx % n_tau];
    cell.analytic_te = analytic_escape_time(cell.ratio_alpha * options.alpha_c,
                                            options.alpha_c,
                                            cell.ratio_tau * options.tau_f,
                                            options.tau_f);
    cell.is_static = cell.ratio_alpha >= 1.0;
    cell.empirical_te = kNaN;
    if (!options.simulate) return;

    double t_max;
    if (options.t_max_override > 0) {
      t_max = options.t_max_override;
    } else {
      t_max = std::isinf(cell.analytic_te)
                  ? options.t_max_cap
                  : std::max(10.0 * cell.analytic_te, 100.0);
      t_max = std::min(t_max, options.t_max_cap);
    }

    EdenParams params;
    params.alpha_c = options.alpha_c;
    params.alpha_s = cell.ratio_alpha * options.alpha_c;
    params.tau_f = options.tau_f;
    params.tau_d = cell.ratio_tau * options.tau_f;
    params.dt = options.dt;
    params.t_max = t_max * options.tau_f;

    double acc = 0.0;
    int count = 0;
    for (int k = 0; k < options.seed_pool; ++k) {
      try {
        const auto mems = generate_rademacher_memories(
            options.n_features, options.n_memories, options.seed + k);
        NetworkState init{mems.pattern(0), Vector::Zero(options.n_features), 0.0};
        const auto traj = integrate(init, mems, params, 10);
        const auto sum = summarize_escapes(traj, mems);
        for (const auto& rec : sum.records) acc += rec.duration;
        count += sum.n_complete;
      } catch (const DivergenceError&) {
        cell.diverged = true;
      }
    }
    cell.n_transitions = count;
    if (count > 0) {
      cell.empirical_te = acc / count;
    } else {
      cell.censored = true;
    }
  });
  return cells;
}

}  // namespace eden
