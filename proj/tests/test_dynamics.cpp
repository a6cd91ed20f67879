#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "eden/dynamics.hpp"
#include "eden/patterns.hpp"

using namespace eden;

namespace {

Vector random_vector(int n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(-scale, scale);
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = unif(gen);
  return x;
}

// straight-line reference evaluation with long double accumulation
std::vector<long double> hidden_oracle(const Vector& v, const Vector& s,
                                       const MemorySequence& mems, double a_s,
                                       double a_c) {
  const int p = mems.n_memories;
  const int n = mems.n_features;
  std::vector<long double> h(p, 0.0L);
  for (int mu = 0; mu < p; ++mu) {
    const int pred = (mu + p - 1) % p;
    long double self = 0.0L, cross = 0.0L;
    for (int i = 0; i < n; ++i) {
      self += static_cast<long double>(mems.xi(mu, i)) * v[i];
      cross += static_cast<long double>(mems.xi(pred, i)) * s[i];
    }
    h[mu] = a_s * self + a_c * cross;
  }
  return h;
}

}  // namespace

TEST_CASE("hidden activation: self term of the cued memory equals N") {
  const auto mems = generate_rademacher_memories(24, 3, 11);
  EdenParams params;
  params.alpha_s = 1.0;
  params.alpha_c = 1.0;
  const Vector h =
      hidden_activation(mems.pattern(1), Vector::Zero(24), mems, params);
  CHECK(h[1] == doctest::Approx(24.0).epsilon(1e-15));
  CHECK(std::abs(h[0]) < 24.0);
  CHECK(std::abs(h[2]) < 24.0);
}

TEST_CASE("hidden activation: slow input drives the successor unit") {
  // s = xi^(1) feeds the unit whose predecessor synapse is xi^(1)
  const auto mems = generate_rademacher_memories(30, 3, 2);
  EdenParams params;
  params.alpha_s = 1.0;
  params.alpha_c = 1.0;
  const Vector h =
      hidden_activation(Vector::Zero(30), mems.pattern(0), mems, params);
  CHECK(h[1] == doctest::Approx(30.0).epsilon(1e-15));
  CHECK(h[0] == doctest::Approx(mems.xi.row(2).dot(mems.xi.row(0))).epsilon(1e-12));
  CHECK(h[2] == doctest::Approx(mems.xi.row(1).dot(mems.xi.row(0))).epsilon(1e-12));
}

TEST_CASE("hidden activation matches a double-loop oracle") {
  const auto mems = generate_rademacher_memories(10, 4, 5);
  EdenParams params;
  params.alpha_s = 0.7;
  params.alpha_c = 1.3;
  const Vector v = random_vector(10, 1);
  const Vector s = random_vector(10, 2);
  const Vector h = hidden_activation(v, s, mems, params);
  const auto oracle = hidden_oracle(v, s, mems, 0.7, 1.3);
  for (int mu = 0; mu < 4; ++mu) {
    CHECK(h[mu] == doctest::Approx(static_cast<double>(oracle[mu])).epsilon(1e-13));
  }
  CHECK_THROWS_AS(hidden_activation(Vector::Zero(9), s, mems, params),
                  std::invalid_argument);
}

TEST_CASE("softmax: symmetry, saturation, and a high-precision oracle") {
  Vector equal(3);
  equal << 7.5, 7.5, 7.5;
  const Vector p_eq = softmax(equal);
  for (int i = 0; i < 3; ++i) CHECK(p_eq[i] == doctest::Approx(1.0 / 3).epsilon(1e-15));

  Vector sat(2);
  sat << 1000.0, 0.0;
  const Vector p_sat = softmax(sat);
  CHECK(p_sat[0] == 1.0);
  CHECK(p_sat[1] == 0.0);

  Vector h(3);
  h << 1.0, 2.0, 3.0;
  const Vector p = softmax(h);
  const long double z = std::expl(1.0L) + std::expl(2.0L) + std::expl(3.0L);
  for (int i = 0; i < 3; ++i) {
    CHECK(p[i] ==
          doctest::Approx(static_cast<double>(std::expl(1.0L + i) / z)).epsilon(1e-14));
  }
}

TEST_CASE("softmax sums to one for any finite input") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> mag(-1e3, 1e3);
  for (int rep = 0; rep < 200; ++rep) {
    const int p = 1 + static_cast<int>(gen() % 12);
    Vector h(p);
    for (int i = 0; i < p; ++i) h[i] = mag(gen);
    const auto sm = softmax_stats(h);
    CHECK(std::abs(sm.probs.sum() - 1.0) <= 1e-12);
    CHECK(sm.probs.minCoeff() >= 0.0);
    // log-sum-exp and softmax share one kernel: p_i == exp(h_i - lse)
    for (int i = 0; i < p; ++i) {
      CHECK(sm.probs[i] ==
            doctest::Approx(std::exp(h[i] - sm.log_sum_exp)).epsilon(1e-12));
    }
  }
}

TEST_CASE("derivative: slow population is stationary when s = v") {
  const auto mems = generate_rademacher_memories(20, 4, 3);
  EdenParams params;
  NetworkState st{random_vector(20, 9), Vector(), 0.0};
  st.s = st.v;
  const auto d = eden_derivative(st, mems, params);
  CHECK(d.ds.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("derivative: a single stored memory is a fixed point") {
  const auto mems = generate_rademacher_memories(16, 1, 8);
  EdenParams params;
  NetworkState st{mems.pattern(0), Vector::Zero(16), 0.0};
  const auto d = eden_derivative(st, mems, params);
  CHECK(d.dv.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("derivative matches a term-by-term oracle at the headline parameters") {
  const auto mems = generate_rademacher_memories(10, 3, 5);
  EdenParams params;  // alpha_s=0.98, alpha_c=1.0, tau_f=1, tau_d=20
  NetworkState st{random_vector(10, 4), random_vector(10, 6), 0.0};
  const auto d = eden_derivative(st, mems, params);

  const auto h = hidden_oracle(st.v, st.s, mems, params.alpha_s, params.alpha_c);
  long double hmax = h[0];
  for (auto x : h) hmax = std::max(hmax, x);
  long double z = 0.0L;
  for (auto x : h) z += std::expl(x - hmax);
  for (int i = 0; i < 10; ++i) {
    long double acc = 0.0L;
    for (int mu = 0; mu < 3; ++mu) {
      acc += static_cast<long double>(mems.xi(mu, i)) * std::expl(h[mu] - hmax) / z;
    }
    const double dv_i = static_cast<double>((acc - st.v[i]) / params.tau_f);
    const double ds_i = (st.v[i] - st.s[i]) / params.tau_d;
    CHECK(d.dv[i] == doctest::Approx(dv_i).epsilon(1e-12));
    CHECK(d.ds[i] == doctest::Approx(ds_i).epsilon(1e-15));
  }
}

TEST_CASE("clamp nonlinearity") {
  CHECK(clamp_sigma(-3.0) == -1.0);
  CHECK(clamp_sigma(0.5) == 0.5);
  CHECK(clamp_sigma(2.0) == 1.0);
  CHECK(clamp_sigma(-1.0) == -1.0);
  CHECK(clamp_sigma(1.0) == 1.0);
}

TEST_CASE("reference derivative: constructed fixed point at alpha_s = 1/N") {
  const auto mems = generate_rademacher_memories(12, 1, 4);
  EdenParams params;
  params.alpha_s = 1.0 / 12;
  params.alpha_c = 0.0;
  NetworkState st{mems.pattern(0), Vector::Zero(12), 0.0};
  const auto d = reference_derivative(st, mems, params);
  CHECK(d.dv.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("reference derivative matches a triple-loop oracle") {
  const auto mems = generate_rademacher_memories(8, 2, 6);
  EdenParams params;
  params.alpha_s = 0.31;
  params.alpha_c = 0.17;
  NetworkState st{random_vector(8, 12, 2.0), random_vector(8, 13), 0.0};
  const auto d = reference_derivative(st, mems, params);
  for (int i = 0; i < 8; ++i) {
    long double acc = 0.0L;
    for (int mu = 0; mu < 2; ++mu) {
      const int pred = (mu + 1) % 2;
      for (int j = 0; j < 8; ++j) {
        acc += params.alpha_s * mems.xi(mu, i) * mems.xi(mu, j) * clamp_sigma(st.v[j]);
        acc += params.alpha_c * mems.xi(mu, i) * mems.xi(pred, j) * st.s[j];
      }
    }
    const double dv_i = static_cast<double>((acc - st.v[i]) / params.tau_f);
    CHECK(d.dv[i] == doctest::Approx(dv_i).epsilon(1e-12));
  }
}

TEST_CASE("reference derivative: pure decay with interactions off") {
  const auto mems = generate_rademacher_memories(10, 3, 1);
  EdenParams params;
  params.alpha_s = 0.0;
  params.alpha_c = 0.5;
  NetworkState st{random_vector(10, 3), Vector::Zero(10), 0.0};
  const auto d = reference_derivative(st, mems, params);
  for (int i = 0; i < 10; ++i) {
    CHECK(d.dv[i] == doctest::Approx(-st.v[i] / params.tau_f).epsilon(1e-15));
  }
}

TEST_CASE("integrate holds the single-memory equilibrium") {
  const auto mems = generate_rademacher_memories(20, 1, 2);
  EdenParams params;
  params.t_max = 50.0;
  NetworkState init{mems.pattern(0), mems.pattern(0), 0.0};
  const auto traj = integrate(init, mems, params, 10);
  for (const auto& s : traj.samples) {
    CHECK((s.v - mems.pattern(0)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((s.s - mems.pattern(0)).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("integrate records with uniform stride and increasing times") {
  const auto mems = generate_rademacher_memories(10, 2, 3);
  EdenParams params;
  params.t_max = 1.0;
  params.dt = 0.01;
  NetworkState init{mems.pattern(0), Vector::Zero(10), 0.0};
  const auto traj = integrate(init, mems, params, 7);
  REQUIRE(traj.size() == 15);  // records at steps 0, 7, ..., 98
  for (std::size_t i = 1; i < traj.size(); ++i) {
    CHECK(traj.samples[i].t - traj.samples[i - 1].t ==
          doctest::Approx(7 * 0.01).epsilon(1e-12));
  }
}

TEST_CASE("integrate with t_max = 0 yields exactly the initial sample") {
  const auto mems = generate_rademacher_memories(10, 2, 3);
  EdenParams params;
  params.t_max = 0.0;
  NetworkState init{mems.pattern(1), Vector::Zero(10), 0.0};
  const auto traj = integrate(init, mems, params, 10);
  REQUIRE(traj.size() == 1);
  CHECK(traj.samples[0].t == 0.0);
  CHECK(traj.observables[0].argmax == 1);
}

TEST_CASE("integrate reports divergence with the offending step") {
  const auto mems = generate_rademacher_memories(10, 2, 3);
  EdenParams params;
  params.t_max = 1.0;
  NetworkState init{Vector::Constant(10, 20.0), Vector::Zero(10), 0.0};
  try {
    integrate(init, mems, params, 1);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.step == 0);
  }
}

TEST_CASE("parameter validation") {
  EdenParams params;
  params.dt = 0.2;  // violates dt <= tau_f/10
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params = EdenParams{};
  params.tau_d = -1.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params = EdenParams{};
  params.alpha_c = 0.0;  // switched-off coupling is allowed
  CHECK_NOTHROW(params.validate());
}

TEST_CASE("sequential recall: argmax walks the circular order") {
  // r = 0.7 keeps the escape margin far above pattern-crosstalk noise, so
  // every seed cycles; the transition order is the thing under test here.
  EdenParams params;
  params.alpha_s = 0.7;
  params.alpha_c = 1.0;
  params.t_max = 200.0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const auto mems = generate_rademacher_memories(100, 5, seed);
    NetworkState init{mems.pattern(0), Vector::Zero(100), 0.0};
    const auto traj = integrate(init, mems, params, 10);
    std::vector<int> seq;
    for (const auto& o : traj.observables) {
      if (seq.empty() || seq.back() != o.argmax) seq.push_back(o.argmax);
    }
    REQUIRE(seq.size() >= 6);  // at least one full cycle in 200 tau_f
    for (std::size_t k = 0; k < seq.size(); ++k) {
      CHECK(seq[k] == static_cast<int>(k % 5));
    }
  }
}

TEST_CASE("recorded softmax weights are internally consistent") {
  EdenParams params;
  params.alpha_s = 0.7;
  params.t_max = 30.0;
  const auto mems = generate_rademacher_memories(50, 4, 9);
  NetworkState init{mems.pattern(0), Vector::Zero(50), 0.0};
  const auto traj = integrate(init, mems, params, 25);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto h = hidden_oracle(traj.samples[i].v, traj.samples[i].s, mems,
                                 params.alpha_s, params.alpha_c);
    long double hmax = h[0];
    for (auto x : h) hmax = std::max(hmax, x);
    long double z = 0.0L;
    for (auto x : h) z += std::expl(x - hmax);
    for (int mu = 0; mu < 4; ++mu) {
      const double expect = static_cast<double>(std::expl(h[mu] - hmax) / z);
      CHECK(traj.observables[i].probs[mu] == doctest::Approx(expect).epsilon(1e-11));
    }
  }
}

TEST_CASE("first-order convergence: halving dt halves the state error") {
  EdenParams params;
  params.alpha_s = 0.7;
  params.alpha_c = 1.0;
  params.t_max = 25.0;  // spans the first transition at these parameters
  const auto mems = generate_rademacher_memories(50, 5, 1);
  NetworkState init{mems.pattern(0), Vector::Zero(50), 0.0};

  auto final_v = [&](double dt) {
    EdenParams p = params;
    p.dt = dt;
    return integrate(init, mems, p, 1).samples.back().v;
  };
  const Vector v1 = final_v(0.02);
  const Vector v2 = final_v(0.01);
  const Vector v3 = final_v(0.005);
  const double e1 = (v1 - v2).norm();
  const double e2 = (v2 - v3).norm();
  CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("without the slow coupling the network is a static associative memory") {
  EdenParams params;
  params.alpha_c = 0.0;
  params.t_max = 30.0;
  const auto mems = generate_rademacher_memories(100, 5, 21);
  std::mt19937_64 gen(33);
  for (int mu = 0; mu < 5; ++mu) {
    Vector cue = mems.pattern(mu);
    for (int flipped = 0; flipped < 10; ++flipped) {  // 10% sign flips
      cue[gen() % 100] *= -1.0;
    }
    NetworkState init{cue, Vector::Zero(100), 0.0};
    const auto traj = integrate(init, mems, params, 10);
    CHECK(traj.observables.back().argmax == mu);
    CHECK(traj.observables.back().m_v[mu] > 0.99);
  }
}
