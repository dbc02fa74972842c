#pragma once

// xoshiro256++ (Blackman & Vigna, 2019) seeded through SplitMix64.
// Streams for parallel chains are separated with the 2^128 jump, so chain k
// of seed s always sees the same, non-overlapping subsequence.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace pdmplab {

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}
  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  /// Generator for stream `stream` of `seed`: the seeded state advanced by
  /// `stream` jumps of 2^128 draws.
  static Xoshiro256pp stream(std::uint64_t seed, std::uint64_t stream) {
    Xoshiro256pp g(seed);
    for (std::uint64_t k = 0; k < stream; ++k) g.jump();
    return g;
  }

  static Xoshiro256pp from_state(const std::array<std::uint64_t, 4>& state) {
    Xoshiro256pp g;
    g.s_ = state;
    return g;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in the open interval (0, 1), 52 random bits plus a half
  /// step, so both endpoints are excluded exactly.
  double uniform_open() { return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52; }
  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Exponential variate with the given rate, by inversion. Never zero.
  double exponential(double rate) { return -std::log(uniform_open()) / rate; }

  void jump() {
    static constexpr std::array<std::uint64_t, 4> kJump = {
        0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL,
        0x39abdc4529b1661cULL};
    std::array<std::uint64_t, 4> acc{};
    for (std::uint64_t word : kJump) {
      for (int b = 0; b < 64; ++b) {
        if (word & (std::uint64_t{1} << b)) {
          for (int k = 0; k < 4; ++k) acc[k] ^= s_[k];
        }
        (*this)();
      }
    }
    s_ = acc;
  }

  friend bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_{};
};

using Rng = Xoshiro256pp;

}  // namespace pdmplab
