// xorshift64* PRNG shared by the VM, the engines and the server so that
// every seeded run is reproducible bit for bit.
#pragma once

#include <cstdint>
#include <stdexcept>

namespace rvm {

struct XorshiftResult {
  uint64_t state;
  uint64_t output;
};

// One step of xorshift64*. State must be nonzero (the all-zero state is a
// fixed point of the shift network).
inline XorshiftResult xorshift64star(uint64_t state) {
  if (state == 0) throw std::invalid_argument("xorshift64star: zero state");
  state ^= state >> 12;
  state ^= state << 25;
  state ^= state >> 27;
  return {state, state * 2685821657736338717ULL};
}

// Stateful convenience wrapper.
class Prng {
 public:
  explicit Prng(uint64_t seed) : state_(seed ? seed : 0x9E3779B97F4A7C15ULL) {}

  uint64_t next() {
    auto r = xorshift64star(state_);
    state_ = r.state;
    return r.output;
  }

  // Uniform in [0, bound). bound == 0 is a caller bug.
  uint64_t below(uint64_t bound) { return next() % bound; }

  uint32_t next_u32() { return static_cast<uint32_t>(next() >> 32); }

  // True with probability p (clamped to [0,1]).
  bool chance(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return (next() >> 11) * 0x1.0p-53 < p;
  }

  uint64_t state() const { return state_; }

 private:
  uint64_t state_;
};

}  // namespace rvm
