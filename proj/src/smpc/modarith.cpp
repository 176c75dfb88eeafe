#include "gridtree/smpc/modarith.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gridtree::smpc {

namespace {

struct Wide {
  u128 hi;
  u128 lo;
};

inline Wide mul_wide(u128 a, u128 b) {
  const std::uint64_t a0 = static_cast<std::uint64_t>(a);
  const std::uint64_t a1 = static_cast<std::uint64_t>(a >> 64);
  const std::uint64_t b0 = static_cast<std::uint64_t>(b);
  const std::uint64_t b1 = static_cast<std::uint64_t>(b >> 64);
  const u128 p00 = static_cast<u128>(a0) * b0;
  const u128 p01 = static_cast<u128>(a0) * b1;
  const u128 p10 = static_cast<u128>(a1) * b0;
  const u128 p11 = static_cast<u128>(a1) * b1;
  const u128 mid = (p00 >> 64) + static_cast<std::uint64_t>(p01) +
                   static_cast<std::uint64_t>(p10);
  Wide w;
  w.lo = static_cast<std::uint64_t>(p00) | (mid << 64);
  w.hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
  return w;
}

inline Wide sqr_wide(u128 a) {
  const std::uint64_t a0 = static_cast<std::uint64_t>(a);
  const std::uint64_t a1 = static_cast<std::uint64_t>(a >> 64);
  const u128 p00 = static_cast<u128>(a0) * a0;
  const u128 p01 = static_cast<u128>(a0) * a1;
  const u128 p11 = static_cast<u128>(a1) * a1;
  const u128 mid = (p00 >> 64) + static_cast<std::uint64_t>(p01) + static_cast<std::uint64_t>(p01);
  Wide w;
  w.lo = static_cast<std::uint64_t>(p00) | (mid << 64);
  w.hi = p11 + ((p01 >> 64) << 1) + (mid >> 64);
  return w;
}

inline u128 addmod(u128 a, u128 b, u128 n) {
  u128 s = a + b;
  if (s < a || s >= n) s -= n;
  return s;
}

u128 mulmod_slow(u128 a, u128 b, u128 m) {
  a %= m;
  u128 r = 0;
  while (b) {
    if (b & 1) r = addmod(r, a, m);
    a = addmod(a, a, m);
    b >>= 1;
  }
  return r;
}

constexpr std::array<unsigned, 24> kBases = {2,  3,  5,  7,  11, 13, 17, 19,
                                             23, 29, 31, 37, 41, 43, 47, 53,
                                             59, 61, 67, 71, 73, 79, 83, 89};

std::vector<unsigned> small_primes(unsigned limit) {
  std::vector<bool> sieve(limit + 1, true);
  std::vector<unsigned> out;
  for (unsigned i = 2; i <= limit; ++i) {
    if (!sieve[i]) continue;
    out.push_back(i);
    for (unsigned j = i * i; j <= limit; j += i) sieve[j] = false;
  }
  return out;
}

}  // namespace

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

u128 u128_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty integer string");
  u128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw std::invalid_argument("bad integer: " + s);
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  return v;
}

ModArith::ModArith(u128 modulus) : n_(modulus) {
  if (modulus < 3 || (modulus & 1) == 0)
    throw std::invalid_argument("ModArith requires an odd modulus >= 3");
  narrow_ = modulus < (static_cast<u128>(1) << 64);
  if (narrow_) {
    n64_ = static_cast<std::uint64_t>(modulus);
    std::uint64_t inv = n64_;
    for (int i = 0; i < 6; ++i) inv *= 2 - n64_ * inv;
    ninv64_ = 0 - inv;
    const u128 r = (static_cast<u128>(1) << 64) % n64_;
    r2_64_ = static_cast<std::uint64_t>((r * r) % n64_);
    ninv_ = 0;
    r2_ = 0;
    return;
  }
  u128 inv = n_;
  for (int i = 0; i < 7; ++i) inv *= 2 - n_ * inv;
  ninv_ = 0 - inv;
  u128 r = (static_cast<u128>(0) - n_) % n_;
  for (int i = 0; i < 128; ++i) r = addmod(r, r, n_);
  r2_ = r;
}

u128 ModArith::redc(u128 hi, u128 lo) const {
  const u128 m = lo * ninv_;
  const Wide mn = mul_wide(m, n_);
  const u128 carry = lo != 0 ? 1 : 0;
  u128 s = hi + mn.hi;
  bool overflow = s < hi;
  const u128 s2 = s + carry;
  overflow = overflow || s2 < s;
  s = s2;
  if (overflow || s >= n_) s -= n_;
  return s;
}

u128 ModArith::mont_mul(u128 a, u128 b) const {
  const Wide w = mul_wide(a, b);
  return redc(w.hi, w.lo);
}

u128 ModArith::mont_sqr(u128 a) const {
  const Wide w = sqr_wide(a);
  return redc(w.hi, w.lo);
}

u128 ModArith::to_mont(u128 a) const { return mont_mul(a % n_, r2_); }
u128 ModArith::from_mont(u128 a) const { return redc(0, a); }

std::uint64_t ModArith::redc64(u128 t) const {
  const std::uint64_t m = static_cast<std::uint64_t>(t) * ninv64_;
  const u128 sum = t + static_cast<u128>(m) * n64_;
  // t + m*n can exceed 2^128 once n >= 2^63; the carry is bit 64 of the result
  const u128 s = (sum >> 64) | (static_cast<u128>(sum < t) << 64);
  return static_cast<std::uint64_t>(s >= n64_ ? s - n64_ : s);
}

std::uint64_t ModArith::mont_mul64(std::uint64_t a, std::uint64_t b) const {
  return redc64(static_cast<u128>(a) * b);
}

u128 ModArith::mul(u128 a, u128 b) const {
  if (narrow_) {
    return static_cast<u128>((static_cast<u128>(static_cast<std::uint64_t>(a % n64_)) *
                              static_cast<std::uint64_t>(b % n64_)) %
                             n64_);
  }
  return from_mont(mont_mul(to_mont(a), to_mont(b)));
}

namespace {

// Sliding window of up to four bits over the odd powers b, b^3, ..., b^15.
template <class Mul, class Sqr>
u128 window_pow(u128 one, u128 b, u128 exp, Mul mul, Sqr sqr) {
  std::array<u128, 8> odd;
  odd[0] = b;
  const u128 b2 = sqr(b);
  for (std::size_t k = 1; k < odd.size(); ++k) odd[k] = mul(odd[k - 1], b2);
  u128 r = one;
  bool started = false;
  int i = 127;
  while (i >= 0 && !((exp >> i) & 1)) --i;
  while (i >= 0) {
    if (!((exp >> i) & 1)) {
      r = sqr(r);
      --i;
      continue;
    }
    int low = std::max(i - 3, 0);
    while (!((exp >> low) & 1)) ++low;
    const auto window = static_cast<unsigned>((exp >> low) & ((u128{1} << (i - low + 1)) - 1));
    if (started) {
      for (int s = low; s <= i; ++s) r = sqr(r);
      r = mul(r, odd[window >> 1]);
    } else {
      r = odd[window >> 1];
      started = true;
    }
    i = low - 1;
  }
  return r;
}

}  // namespace

u128 ModArith::pow(u128 base, u128 exp) const {
  if (narrow_) {
    std::uint64_t b = redc64(static_cast<u128>(static_cast<std::uint64_t>(base % n64_)) * r2_64_);
    std::uint64_t r = redc64(static_cast<u128>(1) * r2_64_);
    while (exp) {
      if (exp & 1) r = mont_mul64(r, b);
      b = mont_mul64(b, b);
      exp >>= 1;
    }
    return redc64(r);
  }
  return from_mont(window_pow(
      to_mont(1), to_mont(base), exp, [this](u128 x, u128 y) { return mont_mul(x, y); },
      [this](u128 x) { return mont_sqr(x); }));
}

bool is_probable_prime(u128 n) {
  if (n < 2) return false;
  for (unsigned p : kBases) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  u128 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  const ModArith ma(n);
  const std::size_t rounds = n < (static_cast<u128>(1) << 64) ? 12 : kBases.size();
  for (std::size_t i = 0; i < rounds; ++i) {
    u128 x = ma.pow(kBases[i], d);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = ma.mul(x, x);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u128 safe_prime(unsigned bits) {
  if (bits < 16 || bits > 128)
    throw std::invalid_argument("safe_prime: bits must be in [16, 128]");
  static std::mutex mu;
  static std::map<unsigned, u128> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(bits); it != cache.end()) return it->second;

  static const std::vector<unsigned> primes = small_primes(2000);
  // p = 2q + 1 >= 2^(bits-1) + 1  <=>  q >= 2^(bits-2)
  u128 q = (static_cast<u128>(1) << (bits - 2)) + 1;
  const u128 limit = bits == 128 ? ~static_cast<u128>(0) >> 1
                                 : (static_cast<u128>(1) << (bits - 1)) - 1;
  for (; q <= limit; q += 2) {
    const u128 p = 2 * q + 1;
    bool ok = true;
    for (unsigned sp : primes) {
      if ((q % sp == 0 && q != sp) || (p % sp == 0 && p != sp)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    if (is_probable_prime(q) && is_probable_prime(p)) {
      cache.emplace(bits, p);
      return p;
    }
  }
  throw std::runtime_error("safe_prime: none found");
}

u128 gcd(u128 a, u128 b) {
  while (b) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u128 inverse_mod(u128 a, u128 m) {
  if (m < 2) return 0;
  a %= m;
  u128 old_r = a, r = m;
  u128 old_s = 1, s = 0;  // coefficients kept reduced mod m
  while (r != 0) {
    const u128 q = old_r / r;
    const u128 nr = old_r - q * r;
    old_r = r;
    r = nr;
    const u128 qs = mulmod_slow(q, s, m);
    const u128 ns = old_s >= qs ? old_s - qs : m - (qs - old_s);
    old_s = s;
    s = ns;
  }
  if (old_r != 1) return 0;
  return old_s % m;
}

}  // namespace gridtree::smpc
