#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "gridtree/rng.hpp"
#include "gridtree/smpc/modarith.hpp"

namespace gridtree::smpc {

/// Item kinds carried in the top bits of an encoded item.
enum class ItemTag : unsigned { Real = 1, Dummy = 2, Marker = 3 };

struct DecodedItem {
  ItemTag tag;
  u128 payload;
  friend bool operator==(const DecodedItem&, const DecodedItem&) = default;
};

/// Quadratic-residue subgroup of Z_p^* for a safe prime p = 2q + 1 with
/// p = 3 mod 4. An item x in [1, (p-1)/2] is encoded as x^2 mod p, which is
/// invertible because exactly one square root lies in that range.
class CommutativeGroup {
 public:
  explicit CommutativeGroup(u128 safe_prime, unsigned bits);
  /// Shared instance for a key length in bits (16..128).
  static std::shared_ptr<const CommutativeGroup> for_bits(unsigned bits);

  u128 prime() const { return p_; }
  unsigned bits() const { return bits_; }
  /// Payload width: the two bits below the top carry the tag.
  unsigned payload_bits() const { return bits_ - 4; }

  u128 encode(ItemTag tag, u128 payload) const;
  DecodedItem decode(u128 element) const;
  bool contains(u128 element) const;
  u128 pow(u128 base, u128 exp) const { return arith_.pow(base, exp); }

 private:
  u128 p_;
  unsigned bits_;
  ModArith arith_;
};

struct CommutativeKey {
  std::shared_ptr<const CommutativeGroup> group;
  u128 e = 0;
  u128 d = 0;
};

CommutativeKey generate_key(std::shared_ptr<const CommutativeGroup> group, Rng& rng);

/// E(x) = x^e mod p. Throws EncodingError when x is not in the subgroup.
u128 commutative_encrypt(const CommutativeKey& key, u128 element);
u128 commutative_decrypt(const CommutativeKey& key, u128 element);

/// Unchecked variants for elements already known to be in the subgroup.
inline u128 encrypt_raw(const CommutativeKey& key, u128 element) {
  return key.group->pow(element, key.e);
}
inline u128 decrypt_raw(const CommutativeKey& key, u128 element) {
  return key.group->pow(element, key.d);
}

/// Packs a short string into a payload; throws EncodingError when it does
/// not fit in `payload_bits`.
u128 pack_string(std::string_view s, unsigned payload_bits);
std::string unpack_string(u128 payload);

/// 64-bit FNV-1a folded into `payload_bits`; used for tuple identifiers
/// where only equality matters.
u128 hash_payload(std::string_view s, unsigned payload_bits);

}  // namespace gridtree::smpc
