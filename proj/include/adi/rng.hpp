#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace adi {

// Seeded generator with portable derived draws. std::mt19937_64's raw
// output sequence is fixed by the standard; the std:: distributions are not,
// so bounded integers and unit doubles are derived here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  // k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace adi
