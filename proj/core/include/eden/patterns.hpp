#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace eden {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Circular sequence indexing (0-based): predecessor of 0 is p-1.
inline int prev_index(int mu, int p) { return (mu + p - 1) % p; }
inline int next_index(int mu, int p) { return (mu + 1) % p; }

/// P binary patterns of dimension N arranged in a circular sequence
/// (pattern mu is followed by mu+1, the last wraps to the first).
/// Rows are pairwise distinct and every entry is exactly -1 or +1.
/// Immutable after construction; safe to share across threads.
struct MemorySequence {
  int n_features = 0;  // N
  int n_memories = 0;  // P
  Matrix xi;           // P x N
  std::uint64_t seed = 0;

  static constexpr const char* generator_id = "mt19937_64";

  Eigen::Ref<const Vector> pattern(int mu) const { return xi.row(mu).transpose(); }
};

/// Samples n_memories distinct Rademacher rows (Pr[+1]=Pr[-1]=1/2) by
/// rejection. Identical (seed, N, P) gives bit-identical output.
/// Throws std::invalid_argument for zero sizes or P > 2^N.
MemorySequence generate_rademacher_memories(int n_features, int n_memories,
                                            std::uint64_t seed);

/// Mattis overlap (1/N) <xi^(mu), x>. In [-1,1] whenever x is in [-1,1]^N.
double overlap(const Vector& x, int mu, const MemorySequence& mems);

/// Index of the memory with maximal <xi^(mu), x>; ties break to the
/// smallest index. Invariant under positive scaling of x.
int argmax_memory(const Vector& x, const MemorySequence& mems);

/// CSV: one row per memory, entries -1/+1. Header JSON: N, P, seed,
/// generator id.
void save_patterns_csv(const MemorySequence& mems, std::ostream& out);
void save_patterns_header_json(const MemorySequence& mems, std::ostream& out);
MemorySequence load_patterns_csv(std::istream& in, std::uint64_t seed = 0);

}  // namespace eden
