#pragma once

#include <cmath>
#include <cstdint>

namespace ordermc {

// Counter-keyed splitmix64 stream. Construct once per (seed, counter)
// pair: the keying hash places substreams far apart in state space, so
// draw i of a run is a pure function of (seed, i), independent of the
// order in which draws are evaluated.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t counter)
        : state_(mix(mix(seed ^ UINT64_C(0x6a09e667f3bcc909)) + counter)) {}

    std::uint64_t next_u64() {
        state_ += UINT64_C(0x9e3779b97f4a7c15);
        return mix(state_);
    }

    // Uniform on [0, 1), 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1] — safe to feed to inverse CDFs.
    double next_unit_open_zero() { return 1.0 - next_unit(); }

    // Standard normal via Box-Muller (consumes two uniforms).
    double next_normal() {
        const double u1 = next_unit_open_zero();
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= UINT64_C(0xbf58476d1ce4e5b9);
        z ^= z >> 27;
        z *= UINT64_C(0x94d049bb133111eb);
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

} // namespace ordermc
