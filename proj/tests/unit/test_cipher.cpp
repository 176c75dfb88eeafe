#include <doctest.h>

#include "gridtree/errors.hpp"
#include "gridtree/rng.hpp"
#include "gridtree/smpc/commutative.hpp"
#include "gridtree/smpc/modarith.hpp"

using namespace gridtree;
using namespace gridtree::smpc;

namespace {

u128 slow_mulmod(u128 a, u128 b, u128 m) {
  u128 r = 0;
  a %= m;
  while (b) {
    if (b & 1) r = (r >= m - a) ? r - (m - a) : r + a;
    a = (a >= m - a) ? a - (m - a) : a + a;
    b >>= 1;
  }
  return r;
}

}  // namespace

TEST_CASE("modular multiplication matches shift-and-add") {
  Rng rng(1);
  for (unsigned bits : {17u, 63u, 64u, 65u, 127u, 128u}) {
    u128 m = rng.next128();
    if (bits < 128) m &= (u128{1} << bits) - 1;
    m |= u128{1} << (bits - 1);
    m |= 1;
    ModArith ar(m);
    for (int k = 0; k < 300; ++k) {
      const u128 a = rng.below128(m), b = rng.below128(m);
      CHECK(ar.mul(a, b) == slow_mulmod(a, b, m));
    }
    CHECK(ar.pow(3, 0) == 1);
    CHECK(ar.pow(0, 5) == 0);
  }
}

TEST_CASE("moduli just above a power of two") {
  Rng rng(6);
  for (unsigned w : {96u, 100u, 126u, 127u}) {
    for (u128 c : {u128{1}, u128{8799}, u128{0xfffffffd}}) {
      const u128 m = (u128{1} << w) + c;
      ModArith ar(m);
      for (int k = 0; k < 300; ++k) {
        const u128 a = k < 2 ? m - 1 - k : rng.below128(m), b = k < 4 ? m - 1 : rng.below128(m);
        CHECK(ar.mul(a, b) == slow_mulmod(a, b, m));
      }
      const u128 x = rng.below128(m);
      u128 slow = 1;
      for (int e = 0; e < 37; ++e) slow = slow_mulmod(slow, x, m);
      CHECK(ar.pow(x, 37) == slow);
    }
  }
}

TEST_CASE("safe primes") {
  for (unsigned bits : {16u, 24u, 32u, 64u, 96u, 128u}) {
    const u128 p = safe_prime(bits);
    CHECK(is_probable_prime(p));
    CHECK(is_probable_prime((p - 1) / 2));
    CHECK((p >> (bits - 1)) == 1);
  }
  CHECK(!is_probable_prime(561));
  CHECK(is_probable_prime(2));
  CHECK(inverse_mod(3, 7) == 5);
  CHECK(inverse_mod(2, 4) == 0);
  CHECK(u128_from_string(to_string(safe_prime(128))) == safe_prime(128));
}

TEST_CASE("item encoding round trips") {
  const auto g = CommutativeGroup::for_bits(64);
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    const u128 x = rng.below128(u128{1} << g->payload_bits());
    for (auto tag : {ItemTag::Real, ItemTag::Dummy, ItemTag::Marker}) {
      const u128 e = g->encode(tag, x);
      CHECK(g->contains(e));
      CHECK(g->decode(e) == DecodedItem{tag, x});
    }
  }
  CHECK_THROWS_AS(g->encode(ItemTag::Real, u128{1} << g->payload_bits()), EncodingError);
  CHECK_THROWS_AS(g->decode(g->prime() - 1), EncodingError);
  CHECK_THROWS_AS(CommutativeGroup::for_bits(8), EncodingError);
}

TEST_CASE("encryption commutes and inverts") {
  for (unsigned bits : {32u, 128u}) {
    const auto g = CommutativeGroup::for_bits(bits);
    Rng rng(bits);
    const auto k1 = generate_key(g, rng), k2 = generate_key(g, rng);
    for (int k = 0; k < 100; ++k) {
      const u128 x = g->encode(ItemTag::Real, rng.below128(u128{1} << g->payload_bits()));
      CHECK(commutative_encrypt(k1, commutative_encrypt(k2, x)) ==
            commutative_encrypt(k2, commutative_encrypt(k1, x)));
      CHECK(commutative_decrypt(k1, commutative_encrypt(k1, x)) == x);
      CHECK(commutative_decrypt(k2, commutative_decrypt(k1, commutative_encrypt(k1, commutative_encrypt(k2, x)))) == x);
    }
    CHECK_THROWS_AS(commutative_encrypt(k1, g->prime() - 1), EncodingError);
  }
}

TEST_CASE("string packing") {
  CHECK(unpack_string(pack_string("sunny", 124)) == "sunny");
  CHECK(unpack_string(pack_string("", 124)) == "");
  CHECK_THROWS_AS(pack_string("a very long attribute value", 60), EncodingError);
  CHECK(hash_payload("t0001", 60) == hash_payload("t0001", 60));
  CHECK(hash_payload("t0001", 60) != hash_payload("t0002", 60));
  CHECK((hash_payload("x", 28) >> 28) == 0);
}
