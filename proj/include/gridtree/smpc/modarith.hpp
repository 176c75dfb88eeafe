#pragma once

#include <cstdint>
#include <string>

namespace gridtree::smpc {

using u128 = unsigned __int128;

std::string to_string(u128 v);
u128 u128_from_string(const std::string& s);

/// Modular arithmetic for an odd modulus below 2^128. Montgomery form is used
/// internally; callers see plain residues. Moduli below 2^64 take a
/// single-word path.
class ModArith {
 public:
  explicit ModArith(u128 modulus);

  u128 modulus() const { return n_; }
  u128 mul(u128 a, u128 b) const;
  u128 pow(u128 base, u128 exp) const;

 private:
  u128 n_;
  bool narrow_;
  // 128-bit Montgomery
  u128 ninv_;  // -n^{-1} mod 2^128
  u128 r2_;    // 2^256 mod n
  // 64-bit Montgomery
  std::uint64_t n64_ = 0, ninv64_ = 0, r2_64_ = 0;

  u128 redc(u128 hi, u128 lo) const;
  u128 to_mont(u128 a) const;
  u128 from_mont(u128 a) const;
  u128 mont_mul(u128 a, u128 b) const;
  u128 mont_sqr(u128 a) const;

  std::uint64_t redc64(u128 t) const;
  std::uint64_t mont_mul64(std::uint64_t a, std::uint64_t b) const;
};

/// Miller-Rabin with a fixed base set; deterministic below 2^64 and
/// overwhelmingly reliable above.
bool is_probable_prime(u128 n);

/// Smallest safe prime p = 2q + 1 (q prime) with p >= 2^(bits-1) + 1.
/// Results are cached per bit length. Valid for 16 <= bits <= 128.
u128 safe_prime(unsigned bits);

u128 gcd(u128 a, u128 b);
/// Inverse of a modulo m, or 0 when none exists.
u128 inverse_mod(u128 a, u128 m);

}  // namespace gridtree::smpc
