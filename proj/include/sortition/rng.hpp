#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace sortition {

// All randomness in the artifact flows through this wrapper so reports can
// name the generator and seed that produced a draw. mt19937_64 is fully
// specified by the standard, so streams are portable across platforms. The
// user seed is passed through splitmix64 first: raw sequential seeds leave
// the twister's early outputs correlated enough to show up in 3-sigma
// marginal checks.
class SeededRng {
public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  static const char* generator_name() { return "mt19937_64/splitmix64-seeded"; }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }
  std::uint64_t seed() const { return seed_; }

  // Uniform in [0, 1).
  double uniform() {
    // 53 random bits, the standard double-from-bits construction.
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return engine_(); }

  // Derive an independent child seed (for per-draw rounding streams).
  std::uint64_t derive_seed() { return engine_(); }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

} // namespace sortition
