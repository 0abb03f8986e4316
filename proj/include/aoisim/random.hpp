#pragma once

#include <cmath>
#include <cstdint>

namespace aoisim {

/// splitmix64 step: advances the state and returns a well-mixed word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds one 64-bit field into a running key.
inline std::uint64_t hash_mix(std::uint64_t key, std::uint64_t value) {
  std::uint64_t s = key ^ (value + 0x9e3779b97f4a7c15ULL + (key << 6) + (key >> 2));
  return splitmix64(s);
}

inline double to_unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
}

/// xoshiro256++ (Blackman/Vigna), seeded from a single word via splitmix64.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    for (auto& word : s_) word = splitmix64(seed);
  }

  std::uint64_t next() {
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

  double uniform01() { return to_unit_interval(next()); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

/// Sequence of energy arrival gaps in internal (unit-rate) time.
class ArrivalSource {
 public:
  virtual ~ArrivalSource() = default;
  virtual double next_gap() = 0;
};

/// Exponential(1) gaps from a dedicated substream.
class PoissonArrivals final : public ArrivalSource {
 public:
  explicit PoissonArrivals(std::uint64_t substream_seed) : rng_(substream_seed) {}
  double next_gap() override { return -std::log1p(-rng_.uniform01()); }

 private:
  Xoshiro256pp rng_;
};

/// Success/erasure outcome for each potential (epoch, attempt) pair.
class ChannelOracle {
 public:
  virtual ~ChannelOracle() = default;
  virtual bool draw(std::int64_t epoch_index, int attempt_index) = 0;
};

/// Stateless Bernoulli(p) oracle: the outcome of every potential attempt is
/// pre-committed as a pure hash of (substream, epoch, attempt), so coupled
/// policies sharing a seed see the same erasure pattern no matter which
/// draws they actually consume.
class HashChannel final : public ChannelOracle {
 public:
  HashChannel(std::uint64_t substream_seed, double success_prob)
      : seed_(substream_seed), p_(success_prob) {}

  bool draw(std::int64_t epoch_index, int attempt_index) override {
    const std::uint64_t h = hash_mix(
        hash_mix(seed_, static_cast<std::uint64_t>(epoch_index)),
        static_cast<std::uint64_t>(attempt_index));
    return to_unit_interval(h) < p_;  // p == 1 always succeeds
  }

 private:
  std::uint64_t seed_;
  double p_;
};

/// Deterministic substream ids derived from (master seed, path, kind).
struct RandomStreams {
  enum Kind : std::uint64_t { kArrivals = 1, kChannel = 2 };

  static std::uint64_t substream(std::uint64_t master_seed, std::uint64_t path_index,
                                 std::uint64_t kind) {
    return hash_mix(hash_mix(master_seed, path_index), kind);
  }

  PoissonArrivals arrivals;
  HashChannel channel;

  RandomStreams(std::uint64_t master_seed, std::uint64_t path_index, double success_prob)
      : arrivals(substream(master_seed, path_index, kArrivals)),
        channel(substream(master_seed, path_index, kChannel), success_prob) {}
};

}  // namespace aoisim
