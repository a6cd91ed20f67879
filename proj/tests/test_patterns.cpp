#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "eden/patterns.hpp"

using namespace eden;

namespace {

// independent oracle: pack a +-1 row into an integer bit mask
std::uint64_t pack_bits(const Matrix& xi, int row) {
  std::uint64_t key = 0;
  for (int j = 0; j < xi.cols(); ++j) {
    if (xi(row, j) > 0) key |= (std::uint64_t{1} << j);
  }
  return key;
}

}  // namespace

TEST_CASE("generated patterns satisfy the type invariants") {
  const auto mems = generate_rademacher_memories(4, 2, 7);
  CHECK(mems.n_features == 4);
  CHECK(mems.n_memories == 2);
  for (int mu = 0; mu < 2; ++mu) {
    for (int j = 0; j < 4; ++j) {
      const double v = mems.xi(mu, j);
      CHECK((v == 1.0 || v == -1.0));
    }
  }
  CHECK(pack_bits(mems.xi, 0) != pack_bits(mems.xi, 1));
}

TEST_CASE("N=1 P=2 forces the two one-bit patterns") {
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 12345ull}) {
    const auto mems = generate_rademacher_memories(1, 2, seed);
    std::vector<double> vals = {mems.xi(0, 0), mems.xi(1, 0)};
    std::sort(vals.begin(), vals.end());
    CHECK(vals[0] == -1.0);
    CHECK(vals[1] == 1.0);
  }
}

TEST_CASE("N=10 P=1024 exhausts the pattern space exactly once") {
  const auto mems = generate_rademacher_memories(10, 1024, 3);
  std::vector<std::uint64_t> keys(1024);
  for (int mu = 0; mu < 1024; ++mu) keys[mu] = pack_bits(mems.xi, mu);
  std::sort(keys.begin(), keys.end());
  for (std::uint64_t k = 0; k < 1024; ++k) CHECK(keys[k] == k);
}

TEST_CASE("generation rejects impossible or empty requests") {
  CHECK_THROWS_AS(generate_rademacher_memories(3, 9, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_rademacher_memories(0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_rademacher_memories(4, 0, 1), std::invalid_argument);
}

TEST_CASE("identical seed gives bit-identical patterns") {
  const auto a = generate_rademacher_memories(31, 17, 99);
  const auto b = generate_rademacher_memories(31, 17, 99);
  CHECK(a.xi == b.xi);
  const auto c = generate_rademacher_memories(31, 17, 100);
  CHECK(a.xi != c.xi);
}

TEST_CASE("overlap of a memory with itself and its negation") {
  const auto mems = generate_rademacher_memories(20, 4, 1);
  for (int mu = 0; mu < 4; ++mu) {
    const Vector x = mems.pattern(mu);
    CHECK(overlap(x, mu, mems) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(overlap(-x, mu, mems) == doctest::Approx(-1.0).epsilon(1e-15));
  }
}

TEST_CASE("cross overlap matches a direct dot-product oracle") {
  const auto mems = generate_rademacher_memories(20, 4, 1);
  const Vector x = mems.pattern(2);
  double expect = 0.0;
  for (int j = 0; j < 20; ++j) expect += mems.xi(0, j) * x[j];
  expect /= 20.0;
  CHECK(overlap(x, 0, mems) == doctest::Approx(expect).epsilon(1e-15));
  CHECK_THROWS_AS(overlap(x, 4, mems), std::out_of_range);
  CHECK_THROWS_AS(overlap(Vector::Zero(19), 0, mems), std::invalid_argument);
}

TEST_CASE("argmax_memory picks the dominant mixture component") {
  const auto mems = generate_rademacher_memories(50, 6, 2);
  CHECK(argmax_memory(mems.pattern(2), mems) == 2);

  const Vector x = 0.9 * mems.pattern(1) + 0.1 * mems.pattern(4);
  // brute force over all memories
  int best = 0;
  double best_u = -1e300;
  for (int mu = 0; mu < 6; ++mu) {
    const double u = mems.xi.row(mu).dot(x.transpose());
    if (u > best_u) {
      best_u = u;
      best = mu;
    }
  }
  CHECK(best == 1);
  CHECK(argmax_memory(x, mems) == best);
}

TEST_CASE("argmax_memory tie-breaks to the smallest index and ignores scale") {
  const auto mems = generate_rademacher_memories(16, 5, 9);
  CHECK(argmax_memory(Vector::Zero(16), mems) == 0);

  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    Vector x(16);
    for (int j = 0; j < 16; ++j) x[j] = unif(gen);
    const int base = argmax_memory(x, mems);
    CHECK(argmax_memory(7.3 * x, mems) == base);
    CHECK(argmax_memory(1e-6 * x, mems) == base);
  }
}

TEST_CASE("cross overlaps have mean ~0 and variance ~1/N") {
  const int n = 100;
  const int trials = 1000;
  std::vector<double> m(trials);
  for (int t = 0; t < trials; ++t) {
    const auto mems = generate_rademacher_memories(n, 2, 1000 + t);
    m[t] = overlap(mems.pattern(0), 1, mems);
  }
  double mean = 0.0;
  for (double v : m) mean += v;
  mean /= trials;
  double var = 0.0;
  for (double v : m) var += (v - mean) * (v - mean);
  var /= trials - 1;

  const double sigma = 1.0 / std::sqrt(n);  // theoretical std of one overlap
  CHECK(std::abs(mean) <= 3.0 * sigma / std::sqrt(trials));
  CHECK(var == doctest::Approx(1.0 / n).epsilon(0.2));
}

TEST_CASE("patterns round-trip through CSV") {
  const auto mems = generate_rademacher_memories(23, 7, 5);
  std::stringstream csv;
  save_patterns_csv(mems, csv);
  const auto back = load_patterns_csv(csv, mems.seed);
  CHECK(back.n_features == mems.n_features);
  CHECK(back.n_memories == mems.n_memories);
  CHECK(back.xi == mems.xi);

  std::stringstream hdr;
  save_patterns_header_json(mems, hdr);
  CHECK(hdr.str().find("mt19937_64") != std::string::npos);
}

TEST_CASE("circular index helpers wrap") {
  CHECK(prev_index(0, 5) == 4);
  CHECK(prev_index(3, 5) == 2);
  CHECK(next_index(4, 5) == 0);
  CHECK(next_index(1, 5) == 2);
}
