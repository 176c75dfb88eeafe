#include "gridtree/smpc/commutative.hpp"

#include <map>
#include <mutex>

#include "gridtree/errors.hpp"

namespace gridtree::smpc {

namespace {
constexpr u128 one = 1;
}

CommutativeGroup::CommutativeGroup(u128 safe_prime, unsigned bits)
    : p_(safe_prime), bits_(bits), arith_(safe_prime) {
  if (bits < 16 || bits > 128) throw EncodingError("key length must be 16..128 bits");
  if ((p_ & 3) != 3) throw EncodingError("group prime must be 3 mod 4");
}

std::shared_ptr<const CommutativeGroup> CommutativeGroup::for_bits(unsigned bits) {
  if (bits < 16 || bits > 128) throw EncodingError("key length must be 16..128 bits");
  static std::mutex mu;
  static std::map<unsigned, std::shared_ptr<const CommutativeGroup>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[bits];
  if (!slot) slot = std::make_shared<const CommutativeGroup>(safe_prime(bits), bits);
  return slot;
}

u128 CommutativeGroup::encode(ItemTag tag, u128 payload) const {
  const unsigned pb = payload_bits();
  if (payload >> pb) throw EncodingError("payload does not fit the item encoding");
  const u128 x = (static_cast<u128>(static_cast<unsigned>(tag)) << pb) | payload;
  return arith_.mul(x, x);
}

DecodedItem CommutativeGroup::decode(u128 element) const {
  if (!contains(element)) throw EncodingError("element is not in the item subgroup");
  u128 r = arith_.pow(element, (p_ + 1) / 4);
  if (r > (p_ - 1) / 2) r = p_ - r;
  const unsigned pb = payload_bits();
  const unsigned tag = static_cast<unsigned>(r >> pb);
  if (tag < 1 || tag > 3) throw EncodingError("element does not decode to an item");
  return {static_cast<ItemTag>(tag), r & ((one << pb) - 1)};
}

bool CommutativeGroup::contains(u128 element) const {
  if (element == 0 || element >= p_) return false;
  return arith_.pow(element, (p_ - 1) / 2) == 1;
}

CommutativeKey generate_key(std::shared_ptr<const CommutativeGroup> group, Rng& rng) {
  const u128 order = group->prime() - 1;
  CommutativeKey k;
  k.group = std::move(group);
  for (;;) {
    const u128 e = 3 + rng.below128(order - 4);
    if ((e & 1) == 0 || gcd(e, order) != 1) continue;
    k.e = e;
    k.d = inverse_mod(e, order);
    return k;
  }
}

u128 commutative_encrypt(const CommutativeKey& key, u128 element) {
  if (!key.group->contains(element)) throw EncodingError("item is outside the cipher group");
  return encrypt_raw(key, element);
}

u128 commutative_decrypt(const CommutativeKey& key, u128 element) {
  if (!key.group->contains(element)) throw EncodingError("ciphertext is outside the cipher group");
  return decrypt_raw(key, element);
}

u128 pack_string(std::string_view s, unsigned payload_bits) {
  // length-prefixed so that strings with trailing zero bytes stay distinct
  if ((s.size() + 1) * 8 > payload_bits)
    throw EncodingError("value '" + std::string(s) + "' is too long for the item encoding");
  u128 v = s.size();
  for (unsigned char c : s) v = (v << 8) | c;
  return v;
}

std::string unpack_string(u128 payload) {
  std::string out;
  while (payload > 0xff) {
    out.push_back(static_cast<char>(payload & 0xff));
    payload >>= 8;
  }
  if (out.size() != static_cast<std::size_t>(payload))
    throw EncodingError("payload is not a packed string");
  return {out.rbegin(), out.rend()};
}

u128 hash_payload(std::string_view s, unsigned payload_bits) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  if (payload_bits >= 64) return h;
  return h & ((std::uint64_t{1} << payload_bits) - 1);
}

}  // namespace gridtree::smpc
