#pragma once

#include <cmath>
#include <cstdint>

namespace agsim {

// Deterministic random stream: xoshiro256++ seeded through splitmix64.
//
// All randomness in the simulator flows through explicit RngStream values.
// A (master_seed, stream_id) pair fully determines the sequence on every
// platform; the standard library distributions are avoided on purpose
// because their output is implementation-defined. Stream ids separate
// independent randomness sources (shadowing draws vs. packet-error draws)
// so that toggling one source does not perturb the other.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) {
    std::uint64_t sm = master_seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1);
    for (auto& word : state_) word = splitmix64(sm);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Zero-mean Gaussian with standard deviation sigma, via Box-Muller.
  // Always consumes exactly two uniforms, so the stream position does not
  // depend on sigma; sigma == 0 yields exactly 0.0.
  double next_gaussian(double sigma) {
    double u1 = next_unit();
    const double u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double z = radius * std::cos(2.0 * kPi * u2);
    return sigma * z;
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4];
};

// Stream ids used by the simulation core. One master seed per run expands
// into these independent substreams.
enum : std::uint64_t {
  kShadowingStream = 0,
  kErrorStream = 1,
};

}  // namespace agsim
