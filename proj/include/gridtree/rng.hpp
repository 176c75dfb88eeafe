#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace gridtree {

/// Seeded generator with portable draws. Standard distributions are
/// implementation-defined, so bounded draws use rejection sampling on the raw
/// engine output instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}
  Rng(std::initializer_list<std::uint64_t> words) {
    std::vector<std::uint32_t> seq;
    for (auto w : words) {
      seq.push_back(static_cast<std::uint32_t>(w));
      seq.push_back(static_cast<std::uint32_t>(w >> 32));
    }
    std::seed_seq ss(seq.begin(), seq.end());
    engine_.seed(ss);
  }

  std::uint64_t next() { return engine_(); }

  unsigned __int128 next128() {
    return (static_cast<unsigned __int128>(engine_()) << 64) | engine_();
  }

  /// Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    if ((bound & (bound - 1)) == 0) return engine_() & (bound - 1);
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform in [0, bound); bound > 0, may exceed 2^64.
  unsigned __int128 below128(unsigned __int128 bound) {
    using u128 = unsigned __int128;
    if ((bound >> 64) == 0) return below(static_cast<std::uint64_t>(bound));
    if ((bound & (bound - 1)) == 0) return next128() & (bound - 1);
    const u128 limit = ~u128{0} - (~u128{0} % bound);
    u128 x;
    do {
      x = next128();
    } while (x >= limit);
    return x % bound;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t k = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[k]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gridtree
