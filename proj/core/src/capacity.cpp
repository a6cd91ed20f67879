#include "eden/capacity.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "eden/parallel.hpp"
#include "eden/energy.hpp"
#include "eden/rng.hpp"

namespace eden {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogistic = std::sqrt(2.0 / std::numbers::pi);

int target_memory(long long P) { return P >= 3 ? 2 : static_cast<int>(P - 1); }

struct TrialResult {
  long long errors = 0;
  bool nonconverged = false;
};

long long count_bit_errors(const Vector& v, const MemorySequence& mems, int mu,
                           double epsilon) {
  long long errors = 0;
  for (int i = 0; i < mems.n_features; ++i) {
    if (v[i] * mems.xi(mu, i) < 1.0 - epsilon) ++errors;
  }
  return errors;
}

/// Frozen-s fixed point of the reference network: v = Xi^T q with
/// q_mu = alpha_s <xi^(mu), sigma(v)> + alpha_c <xi^(mu-1), s>.
FixedPointResult reference_fixed_point(const Vector& v0, const Vector& s_frozen,
                                       const MemorySequence& mems,
                                       double alpha_s, double alpha_c,
                                       double tol, int max_iter) {
  const Eigen::Index p = mems.n_memories;
  Vector w = mems.xi * s_frozen;
  Vector cross(p);
  cross[0] = w[p - 1];
  cross.tail(p - 1) = w.head(p - 1);
  cross *= alpha_c;

  FixedPointResult r;
  r.v_star = v0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector sig = r.v_star.unaryExpr([](double x) { return clamp_sigma(x); });
    const Vector q = alpha_s * (mems.xi * sig) + cross;
    const Vector v_next = mems.xi.transpose() * q;
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

TrialResult run_trial(const CapacitySpec& spec, long long P, std::uint64_t trial_seed,
                      Model model) {
  const auto mems = generate_rademacher_memories(spec.n_features,
                                                 static_cast<int>(P), trial_seed);
  const int mu = target_memory(P);
  const int prev = prev_index(mu, mems.n_memories);
  const int prev2 = prev_index(prev, mems.n_memories);
  const double lambda = std::sqrt(spec.r);

  // Slow state at the escape time, evolved from s(0) = sqrt(r) xi^(mu-2):
  // the decayed previous trace plus the risen current memory.
  const Vector s_star = lambda * (1.0 - lambda) * mems.pattern(prev2) +
                        lambda * mems.pattern(prev);
  const Vector v0 = mems.pattern(mu);

  FixedPointResult fp;
  if (model == Model::eden) {
    EdenParams params;
    params.alpha_c = spec.alpha;
    params.alpha_s = spec.r * spec.alpha;
    fp = find_fixed_point(v0, s_star, mems, params, 1e-10, 10000);
  } else {
    // Appendix-style normalization: couplings of order 1/N keep the clamp
    // network's retrieval states next to +-1.
    const double base = 1.0 / ((1.0 + spec.r) * (spec.n_features - 1));
    fp = reference_fixed_point(v0, s_star, mems, spec.r * base, base, 1e-10, 2000);
  }

  TrialResult out;
  if (!fp.converged) {
    out.nonconverged = true;
    out.errors = spec.n_features;  // a failed fixed point fails every bit
  } else {
    out.errors = count_bit_errors(fp.v_star, mems, mu, spec.epsilon);
  }
  return out;
}

}  // namespace

void CapacitySpec::validate() const {
  if (n_features < 1) throw std::invalid_argument("CapacitySpec: n_features must be >= 1");
  if (!(alpha > 0)) throw std::invalid_argument("CapacitySpec: alpha must be > 0");
  if (!(r > 0) || r > 1.0) throw std::invalid_argument("CapacitySpec: r must be in (0,1]");
  if (!(epsilon > 0) || !(epsilon < 1)) {
    throw std::invalid_argument("CapacitySpec: epsilon must be in (0,1)");
  }
  if (!(delta > 0) || delta > 1.0) {
    throw std::invalid_argument("CapacitySpec: delta must be in (0,1]");
  }
  if (trials < 1) throw std::invalid_argument("CapacitySpec: trials must be >= 1");
  if (p_cap < 1) throw std::invalid_argument("CapacitySpec: p_cap must be >= 1");
}

ErrorEstimate single_bit_error_probability(const CapacitySpec& spec, long long P,
                                           std::uint64_t seed, Model model,
                                           int jobs) {
  spec.validate();
  if (P < 1) throw std::invalid_argument("single_bit_error_probability: P must be >= 1");
  if (spec.n_features < 63 &&
      static_cast<std::uint64_t>(P) > (std::uint64_t{1} << spec.n_features)) {
    throw std::invalid_argument("single_bit_error_probability: P exceeds 2^N");
  }
  if (model == Model::reference && spec.n_features < 2) {
    throw std::invalid_argument("single_bit_error_probability: reference model needs N >= 2");
  }

  std::vector<TrialResult> results(spec.trials);
  parallel_for(static_cast<std::size_t>(spec.trials), jobs, [&](std::size_t t) {
    results[t] = run_trial(spec, P, derive_seed(seed, t), model);
  });

  ErrorEstimate est;
  est.p = P;
  for (const auto& r : results) {  // deterministic order
    est.errors += r.errors;
    est.nonconverged += r.nonconverged ? 1 : 0;
  }
  est.samples = static_cast<long long>(spec.trials) * spec.n_features;
  est.probability = static_cast<double>(est.errors) / est.samples;
  est.std_error = std::sqrt(est.probability * (1.0 - est.probability) /
                            static_cast<double>(est.samples));
  return est;
}

CapacityEstimate empirical_capacity(const CapacitySpec& spec, std::uint64_t seed,
                                    Model model, int jobs) {
  spec.validate();
  CapacityEstimate out;
  out.spec = spec;
  if (model == Model::eden) {
    out.analytic_capacity =
        spec.delta < 1.0 ? analytic_capacity_eden(spec) : kInf;
  } else {
    out.analytic_capacity =
        analytic_capacity_reference(spec.n_features, spec.epsilon, spec.delta);
  }

  const long long hard_cap =
      spec.n_features < 63
          ? std::min<long long>(spec.p_cap, 1LL << spec.n_features)
          : spec.p_cap;

  auto eval = [&](long long P) -> const ErrorEstimate& {
    out.curve.push_back(single_bit_error_probability(spec, P, seed, model, jobs));
    return out.curve.back();
  };

  // Doubling phase.
  long long lo = 0, hi = 0;
  long long P = 1;
  while (true) {
    const auto& e = eval(P);
    if (e.probability <= spec.delta) {
      lo = P;
      if (P >= hard_cap) break;
      P = std::min(P * 2, hard_cap);
    } else {
      hi = P;
      break;
    }
  }
  // Bisection phase.
  if (hi > 0) {
    while (hi - lo > 1) {
      const long long mid = lo + (hi - lo) / 2;
      const auto& e = eval(mid);
      if (e.probability <= spec.delta) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  out.capacity = lo;
  out.saturated = (hi == 0 && lo == spec.p_cap);
  return out;
}

double beta_factor(double x) { return 0.5 * (1.0 + std::exp(-2.0 * x)); }

double capacity_growth_base(double alpha, double r) {
  return 1.0 / (beta_factor(alpha * r) * beta_factor(alpha));
}

double analytic_capacity_eden(const CapacitySpec& spec) {
  if (!(spec.r > 0) || !(spec.alpha > 0)) {
    throw std::invalid_argument("analytic_capacity_eden: alpha and r must be > 0");
  }
  if (!(spec.epsilon > 0) || !(spec.epsilon < 1) || !(spec.delta > 0) ||
      !(spec.delta < 1)) {
    throw std::invalid_argument("analytic_capacity_eden: epsilon, delta must be in (0,1)");
  }
  const int N = spec.n_features;
  const double b1 = beta_factor(spec.alpha * spec.r) * beta_factor(spec.alpha);
  const double b2 = beta_factor(2 * spec.alpha * spec.r) * beta_factor(2 * spec.alpha);
  const double sqrt_c = std::exp(0.5 * (N - 1) * std::log(b1 / b2));
  const double a = std::log((1.0 - spec.delta) / spec.delta) / (2.0 * kLogistic * sqrt_c);
  // Root of x^2 + a*x - eps with x = sqrt(P) * b1^{(N-1)/2}; for a >= 0 the
  // subtraction is rearranged to avoid cancellation.
  const double root = a >= 0
                          ? 2.0 * spec.epsilon /
                                (a + std::sqrt(a * a + 4.0 * spec.epsilon))
                          : 0.5 * (-a + std::sqrt(a * a + 4.0 * spec.epsilon));
  return std::exp(-(N - 1) * std::log(b1) + 2.0 * std::log(root));
}

double analytic_capacity_reference(int n_features, double epsilon, double delta) {
  if (n_features < 2) {
    throw std::invalid_argument("analytic_capacity_reference: n_features must be >= 2");
  }
  return 1.0 + 2.0 * delta * epsilon * epsilon * (n_features - 1);
}

double gaussian_cdf_logistic(double x) {
  const double t = 2.0 * kLogistic * x;
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double eden_success_rate(double P, int n_features, double alpha, double r,
                         double epsilon) {
  if (!(P > 0)) throw std::invalid_argument("eden_success_rate: P must be > 0");
  const int N = n_features;
  const double b1p = std::exp((N - 1) * std::log(beta_factor(alpha * r) *
                                                 beta_factor(alpha)));
  const double b2p = std::exp(0.5 * (N - 1) *
                              std::log(beta_factor(2 * alpha * r) *
                                       beta_factor(2 * alpha)));
  const double x = (P * b1p * (epsilon - 1.0) + epsilon) / (std::sqrt(P) * b2p);
  return gaussian_cdf_logistic(x);
}

}  // namespace eden
