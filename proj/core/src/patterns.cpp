#include "eden/patterns.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "eden/rng.hpp"

namespace eden {

namespace {

std::string pack_row(const Matrix& xi, int row) {
  const int n = static_cast<int>(xi.cols());
  std::string key((n + 7) / 8, '\0');
  for (int j = 0; j < n; ++j) {
    if (xi(row, j) > 0) key[j / 8] |= static_cast<char>(1 << (j % 8));
  }
  return key;
}

}  // namespace

MemorySequence generate_rademacher_memories(int n_features, int n_memories,
                                            std::uint64_t seed) {
  if (n_features <= 0 || n_memories <= 0) {
    throw std::invalid_argument("generate_rademacher_memories: sizes must be positive");
  }
  if (n_features < 63 &&
      static_cast<std::uint64_t>(n_memories) > (std::uint64_t{1} << n_features)) {
    throw std::invalid_argument(
        "generate_rademacher_memories: n_memories exceeds 2^n_features, "
        "distinct patterns impossible");
  }

  MemorySequence mems;
  mems.n_features = n_features;
  mems.n_memories = n_memories;
  mems.seed = seed;
  mems.xi.resize(n_memories, n_features);

  RademacherSource src(seed);
  std::unordered_set<std::string> seen;
  seen.reserve(static_cast<std::size_t>(n_memories) * 2);
  int row = 0;
  while (row < n_memories) {
    for (int j = 0; j < n_features; ++j) mems.xi(row, j) = src.next();
    if (seen.insert(pack_row(mems.xi, row)).second) ++row;  // else resample
  }
  return mems;
}

double overlap(const Vector& x, int mu, const MemorySequence& mems) {
  if (x.size() != mems.n_features) {
    throw std::invalid_argument("overlap: x has wrong length");
  }
  if (mu < 0 || mu >= mems.n_memories) {
    throw std::out_of_range("overlap: memory index out of range");
  }
  return mems.xi.row(mu).dot(x.transpose()) / mems.n_features;
}

int argmax_memory(const Vector& x, const MemorySequence& mems) {
  if (x.size() != mems.n_features) {
    throw std::invalid_argument("argmax_memory: x has wrong length");
  }
  const Vector u = mems.xi * x;
  int best = 0;
  for (int mu = 1; mu < mems.n_memories; ++mu) {
    if (u[mu] > u[best]) best = mu;  // strict: ties keep the smaller index
  }
  return best;
}

void save_patterns_csv(const MemorySequence& mems, std::ostream& out) {
  for (int mu = 0; mu < mems.n_memories; ++mu) {
    for (int j = 0; j < mems.n_features; ++j) {
      if (j) out << ',';
      out << (mems.xi(mu, j) > 0 ? "1" : "-1");
    }
    out << '\n';
  }
}

void save_patterns_header_json(const MemorySequence& mems, std::ostream& out) {
  out << "{\"n_features\": " << mems.n_features
      << ", \"n_memories\": " << mems.n_memories << ", \"seed\": " << mems.seed
      << ", \"generator\": \"" << MemorySequence::generator_id << "\"}\n";
}

MemorySequence load_patterns_csv(std::istream& in, std::uint64_t seed) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("load_patterns_csv: empty input");
  MemorySequence mems;
  mems.n_memories = static_cast<int>(rows.size());
  mems.n_features = static_cast<int>(rows[0].size());
  mems.seed = seed;
  mems.xi.resize(mems.n_memories, mems.n_features);
  for (int mu = 0; mu < mems.n_memories; ++mu) {
    if (static_cast<int>(rows[mu].size()) != mems.n_features) {
      throw std::invalid_argument("load_patterns_csv: ragged rows");
    }
    for (int j = 0; j < mems.n_features; ++j) {
      const double v = rows[mu][j];
      if (v != 1.0 && v != -1.0) {
        throw std::invalid_argument("load_patterns_csv: entries must be -1 or +1");
      }
      mems.xi(mu, j) = v;
    }
  }
  return mems;
}

}  // namespace eden
