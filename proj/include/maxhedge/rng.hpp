#pragma once

#include <cstdint>
#include <limits>

namespace maxhedge {

// xoshiro256** seeded through splitmix64. Satisfies UniformRandomBitGenerator.
//
// Streams are addressed by (seed, stream id): Rng::stream(seed, t) yields the same sequence no matter
// how many numbers other streams consumed, which is how each trial gets a reproducible sub-stream.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) { reseed(seed, 0); }
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    Rng r(0);
    r.reseed(seed, stream_id);
    return r;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Derives an independent child stream; the parent advances by one output.
  Rng split() { return stream((*this)(), 0x9e3779b97f4a7c15ULL); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  void reseed(std::uint64_t seed, std::uint64_t stream_id) {
    std::uint64_t state = seed;
    const std::uint64_t key = splitmix(state);
    state = key ^ (stream_id * 0xd1b54a32d192ed03ULL + 0x8bb84b93962eacc9ULL);
    for (auto& word : s_) word = splitmix(state);
  }

  std::uint64_t s_[4];
};

}  // namespace maxhedge
