#pragma once

#include <cstdint>
#include <random>

namespace eden {

/// splitmix64 step; used to derive independent per-worker seeds from a base
/// seed so that results do not depend on thread scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream + 1));
}

/// Draws ±1 values one bit at a time from a mt19937_64 word. The engine's
/// output sequence is fixed by the standard, so pattern generation is
/// bit-reproducible across platforms.
class RademacherSource {
 public:
  explicit RademacherSource(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (bits_left_ == 0) {
      word_ = gen_();
      bits_left_ = 64;
    }
    const double out = (word_ & 1u) ? 1.0 : -1.0;
    word_ >>= 1;
    --bits_left_;
    return out;
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t word_ = 0;
  int bits_left_ = 0;
};

}  // namespace eden
