#pragma once

#include <cstdint>
#include <cstring>
#include <cmath>
#include <initializer_list>
#include <string_view>

namespace sitesim {

// Deterministic random stream (xoshiro256++ seeded via splitmix64).
//
// The simulator never touches <random> distributions: their output is
// implementation-defined, and every reported number must be reproducible
// from (seed, episode, purpose) alone. Streams are derived by hashing the
// root seed with labels, so adding a new noise source never perturbs the
// draws of an existing one.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) {
    uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  // Derive a child stream from a root seed plus mixed-in labels, e.g.
  // derive(seed, {episode_index, hash_label("scenario")}).
  static RngStream derive(uint64_t root, std::initializer_list<uint64_t> labels) {
    return RngStream(derive_seed(root, labels));
  }

  static uint64_t derive_seed(uint64_t root, std::initializer_list<uint64_t> labels) {
    uint64_t h = root;
    for (uint64_t l : labels) {
      h ^= l + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      uint64_t x = h;
      h = splitmix64(x);
    }
    return h;
  }

  static uint64_t hash_label(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi] inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(next_u64() % span);
  }

  /// Standard normal draw (Box-Muller, cached pair).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double std_dev) { return mean + std_dev * normal(); }

 private:
  static uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sitesim
