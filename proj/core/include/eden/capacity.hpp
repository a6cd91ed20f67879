#pragma once

#include <cstdint>
#include <vector>

#include "eden/dynamics.hpp"
#include "eden/patterns.hpp"

namespace eden {

/// Monte Carlo capacity experiment description. alpha_c = alpha and
/// alpha_s = r * alpha; r defaults to 0.999 (just inside the dynamic
/// regime, where the slow state at a transition is known in closed form).
struct CapacitySpec {
  int n_features = 20;    // N
  double alpha = 2.0;     // cross-interaction strength
  double r = 0.999;       // alpha_s / alpha_c
  double epsilon = 1e-3;  // per-bit fixed-point error tolerance
  double delta = 1e-3;    // tolerable bit-error rate
  int trials = 100;       // Monte Carlo pattern draws
  long long p_cap = 1000000;  // largest P searched

  void validate() const;
};

struct ErrorEstimate {
  long long p = 0;
  long long errors = 0;        // bit errors pooled over trials x bits
  long long samples = 0;       // trials * N
  int nonconverged = 0;        // fixed-point failures (counted as all-bit errors)
  double probability = 0.0;    // errors / samples
  double std_error = 0.0;      // binomial standard error of the pooled estimate
};

/// Single-bit retrieval error at P stored memories.
///
/// Per trial: draw a fresh MemorySequence, pick the target memory mu, freeze
/// the slow state at its analytic transition value
///   s* = sqrt(r) xi^(mu-1) + sqrt(r)(1-sqrt(r)) xi^(mu-2)
/// (the capacity protocol's s(0) = sqrt(r) xi^(mu-2) advanced to the escape
/// time), run the frozen-s fixed point seeded at xi^(mu), and count bits with
/// v_i xi^(mu)_i < 1 - epsilon. Non-convergence counts every bit as an error.
/// Trials run concurrently on per-trial RNG streams derived from (seed,
/// trial), so results are schedule-independent and bit-reproducible.
ErrorEstimate single_bit_error_probability(const CapacitySpec& spec, long long P,
                                           std::uint64_t seed,
                                           Model model = Model::eden,
                                           int jobs = 0);

struct CapacityEstimate {
  CapacitySpec spec;
  std::vector<ErrorEstimate> curve;  // every P evaluated, in evaluation order
  long long capacity = 0;            // largest P with error <= delta
  bool saturated = false;            // capacity hit p_cap (lower bound only)
  double analytic_capacity = 0.0;
};

/// Largest P with estimated bit-error probability <= delta, found by doubling
/// then bisection (the error curve is monotone in P up to Monte Carlo noise).
CapacityEstimate empirical_capacity(const CapacitySpec& spec, std::uint64_t seed,
                                    Model model = Model::eden, int jobs = 0);

/// beta_x = cosh(x)/exp(x), the pattern-average moment factor of the
/// capacity algebra.
double beta_factor(double x);

/// Closed-form capacity of the softmax network: the positive root of
///   P + sqrt(P) ln((1-delta)/delta)/(2k) (sqrt(b2)/b1)^{N-1} - eps/b1^{N-1} = 0
/// with b1 = beta_{ar} beta_a, b2 = beta_{2ar} beta_{2a}, k = sqrt(2/pi).
/// Equivalently P = (1/b1)^{N-1} [ (ln(d/(1-d))/(2k sqrt(c)) +
/// sqrt(ln((1-d)/d)^2/(4k^2 c) + 4 eps)) / 2 ]^2 with c = (b1/b2)^{N-1}.
/// Grows as gamma^{N-1}, gamma = exp(ar) exp(a) / (cosh(ar) cosh(a)).
double analytic_capacity_eden(const CapacitySpec& spec);

/// Chebyshev bound capacity of the reference network: 1 + 2 delta eps^2 (N-1).
double analytic_capacity_reference(int n_features, double epsilon, double delta);

/// Logistic approximation of the Gaussian CDF:
/// Phi(x) ~ exp(2kx)/(1+exp(2kx)), k = sqrt(2/pi).
double gaussian_cdf_logistic(double x);

/// Success rate Pr[v_i xi_i >= 1-eps] for the moment-matched Gaussian of the
/// capacity analysis, evaluated with the logistic CDF. Recovers 1-delta when
/// P = analytic_capacity_eden (the back-substitution self-consistency check).
double eden_success_rate(double P, int n_features, double alpha, double r,
                         double epsilon);

/// gamma = exp(alpha r) exp(alpha) / (cosh(alpha r) cosh(alpha)).
double capacity_growth_base(double alpha, double r);

}  // namespace eden
