#ifndef POLICHANGE_RNG_HPP
#define POLICHANGE_RNG_HPP

#include <cstdint>
#include <random>

namespace polichange {

// Seeded generator whose draws are identical on every platform. The standard
// distributions are implementation-defined, so bounded draws are done by
// rejection on the raw engine output instead.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    if (bound < 2) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return draw % bound;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace polichange

#endif
