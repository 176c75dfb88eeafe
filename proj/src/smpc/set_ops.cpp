#include "gridtree/smpc/set_ops.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gridtree/errors.hpp"

namespace gridtree::smpc {

PaddedItemSet pad_item_set(const CommutativeGroup& group, std::span<const u128> items,
                           std::size_t agreed_size, Rng& rng) {
  if (items.size() > agreed_size)
    throw PaddingOverflow("set of " + std::to_string(items.size()) +
                          " items exceeds the agreed size " + std::to_string(agreed_size));
  PaddedItemSet s;
  s.agreed_size = agreed_size;
  s.real_count = items.size();
  s.elements.reserve(agreed_size);
  for (auto x : items) s.elements.push_back(group.encode(ItemTag::Real, x));
  const u128 span = u128{1} << group.payload_bits();
  std::set<u128> seen;
  while (s.elements.size() < agreed_size) {
    const u128 payload = rng.below128(span);
    if (seen.insert(payload).second) s.elements.push_back(group.encode(ItemTag::Dummy, payload));
  }
  rng.shuffle(s.elements);
  return s;
}

namespace {

std::uint64_t set_bits(std::size_t n, const CommutativeGroup& g) {
  return static_cast<std::uint64_t>(n) * g.bits();
}

void encrypt_all(net::Network& net, PartyId p, const CommutativeKey& key, std::vector<u128>& xs) {
  for (auto& x : xs) x = encrypt_raw(key, x);
  net.transcript().charge_cipher(p, xs.size());
}

void decrypt_all(net::Network& net, PartyId p, const CommutativeKey& key, std::vector<u128>& xs) {
  for (auto& x : xs) x = decrypt_raw(key, x);
  net.transcript().charge_cipher(p, xs.size());
}

net::Payload to_payload(const std::vector<u128>& xs) { return net::Payload(xs.begin(), xs.end()); }
std::vector<u128> from_payload(net::Payload p) { return std::vector<u128>(p.begin(), p.end()); }

void sort_unique(std::vector<u128>& xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

struct Setup {
  std::shared_ptr<const CommutativeGroup> group;
  std::vector<CommutativeKey> keys;
  std::size_t agreed = 0;
};

Setup phase1_setup(net::Network& net, std::span<const PartyId> parties,
                   const std::vector<std::vector<u128>>& sets, const SetProtocolOptions& opts) {
  const std::size_t k = parties.size();
  if (k < opts.min_parties || k < 2)
    throw TooFewParties("set protocol needs at least " + std::to_string(std::max<std::size_t>(2, opts.min_parties)) +
                        " parties, got " + std::to_string(k));
  if (sets.size() != k) throw SpecError("one set per party is required");
  if (!opts.group) throw SpecError("set protocol needs a cipher group");
  Setup s;
  s.group = opts.group;
  s.agreed = opts.agreed_size;
  if (s.agreed == 0)
    for (const auto& x : sets) s.agreed = std::max(s.agreed, x.size());
  if (!opts.keys.empty()) {
    if (opts.keys.size() != k) throw SpecError("one key per party is required");
    s.keys = opts.keys;
  } else {
    for (auto p : parties) s.keys.push_back(generate_key(s.group, net.rng(p)));
  }
  return s;
}

// Phase 2: every set is encrypted by every party while travelling k-1 hops
// along the ring. Returns the fully encrypted set held by each party.
std::vector<std::vector<u128>> phase2(net::Network& net, std::span<const PartyId> parties,
                                      std::vector<std::vector<u128>> held, const Setup& s,
                                      const std::string& tag) {
  const std::size_t k = parties.size();
  const std::string t = tag + ":p2";
  for (std::size_t step = 0; step < k; ++step) {
    if (step > 0) {
      net.tick();
      for (std::size_t b = 0; b < k; ++b) held[b] = from_payload(net.recv(parties[b], parties[(b + k - 1) % k], t));
    }
    for (std::size_t b = 0; b < k; ++b) {
      encrypt_all(net, parties[b], s.keys[b], held[b]);
      net.rng(parties[b]).shuffle(held[b]);
    }
    if (step + 1 < k)
      for (std::size_t b = 0; b < k; ++b)
        net.send(parties[b], parties[(b + 1) % k], t, to_payload(held[b]), set_bits(held[b].size(), *s.group));
  }
  return held;
}

// Phase 3: fully encrypted sets are gathered at parties 0 and 1; party 1
// forwards what it has to party 0. With `dedup` both collectors remove
// duplicates, otherwise the multiset is kept.
std::vector<u128> phase3(net::Network& net, std::span<const PartyId> parties,
                         std::vector<std::vector<u128>> held, const Setup& s,
                         const std::string& tag, bool dedup) {
  const std::size_t k = parties.size();
  const std::string t = tag + ":p3";
  auto collector = [k](std::size_t b) -> std::size_t {
    if (b == k - 1) return 1;
    return b % 2 == 0 ? 0 : 1;
  };
  for (std::size_t b = 2; b < k; ++b)
    net.send(parties[b], parties[collector(b)], t, to_payload(held[b]), set_bits(held[b].size(), *s.group));
  net.tick();
  std::vector<u128> at0 = std::move(held[0]);
  std::vector<u128> at1 = std::move(held[1]);
  for (std::size_t b = 2; b < k; ++b) {
    auto got = from_payload(net.recv(parties[collector(b)], parties[b], t));
    auto& dst = collector(b) == 0 ? at0 : at1;
    dst.insert(dst.end(), got.begin(), got.end());
  }
  if (dedup) sort_unique(at1);
  else std::sort(at1.begin(), at1.end());
  net.send(parties[1], parties[0], t + "merge", to_payload(at1), set_bits(at1.size(), *s.group));
  net.tick();
  auto got = from_payload(net.recv(parties[0], parties[1], t + "merge"));
  at0.insert(at0.end(), got.begin(), got.end());
  if (dedup) sort_unique(at0);
  else std::sort(at0.begin(), at0.end());
  return at0;
}

std::vector<std::vector<u128>> padded_inputs(net::Network& net, std::span<const PartyId> parties,
                                             const std::vector<std::vector<u128>>& sets, const Setup& s) {
  std::vector<std::vector<u128>> held;
  for (std::size_t b = 0; b < parties.size(); ++b) {
    std::vector<u128> items = sets[b];
    sort_unique(items);
    if (items.size() != sets[b].size()) throw SpecError("set items must be distinct");
    held.push_back(pad_item_set(*s.group, items, s.agreed, net.rng(parties[b])).elements);
  }
  return held;
}

// Phase 4 decryption chain: parties[0] .. parties[k-1] strip their layers in
// turn; the last party ends with plain group elements.
std::vector<u128> decrypt_chain(net::Network& net, std::span<const PartyId> parties,
                                std::vector<u128> xs, const Setup& s, const std::string& tag) {
  const std::size_t k = parties.size();
  const std::string t = tag + ":p4";
  for (std::size_t b = 0; b < k; ++b) {
    if (b > 0) {
      net.tick();
      xs = from_payload(net.recv(parties[b], parties[b - 1], t));
    }
    decrypt_all(net, parties[b], s.keys[b], xs);
    net.rng(parties[b]).shuffle(xs);
    if (b + 1 < k) net.send(parties[b], parties[b + 1], t, to_payload(xs), set_bits(xs.size(), *s.group));
  }
  return xs;
}

void announce(net::Network& net, PartyId from, std::span<const PartyId> to, const std::string& tag,
              const net::Payload& payload, std::uint64_t bits) {
  for (auto p : to)
    if (!(p == from)) net.send(from, p, tag, payload, bits);
  net.tick();
  for (auto p : to)
    if (!(p == from)) net.recv(p, from, tag);
}

}  // namespace

EncryptedSet secure_union_encrypted(net::Network& net, std::span<const PartyId> parties,
                                    const std::vector<std::vector<u128>>& sets,
                                    const SetProtocolOptions& opts) {
  const Setup s = phase1_setup(net, parties, sets, opts);
  auto held = phase2(net, parties, padded_inputs(net, parties, sets, s), s, opts.tag);
  return {parties[0], phase3(net, parties, std::move(held), s, opts.tag, true)};
}

std::vector<u128> secure_union(net::Network& net, std::span<const PartyId> parties,
                               const std::vector<std::vector<u128>>& sets,
                               const SetProtocolOptions& opts) {
  const Setup s = phase1_setup(net, parties, sets, opts);
  auto held = phase2(net, parties, padded_inputs(net, parties, sets, s), s, opts.tag);
  auto u = phase3(net, parties, std::move(held), s, opts.tag, true);
  auto plain = decrypt_chain(net, parties, std::move(u), s, opts.tag);
  std::vector<u128> out;
  for (auto x : plain) {
    const auto d = s.group->decode(x);
    if (d.tag == ItemTag::Real) out.push_back(d.payload);
  }
  std::sort(out.begin(), out.end());
  announce(net, parties.back(), parties, opts.tag + ":result", to_payload(out),
           set_bits(out.size(), *s.group));
  return out;
}

std::size_t encrypted_intersection_size(std::span<const std::vector<u128>* const> sets) {
  if (sets.empty()) return 0;
  std::vector<u128> acc = *sets[0];
  sort_unique(acc);
  for (std::size_t k = 1; k < sets.size() && !acc.empty(); ++k) {
    std::vector<u128> other = *sets[k];
    sort_unique(other);
    std::vector<u128> next;
    std::set_intersection(acc.begin(), acc.end(), other.begin(), other.end(), std::back_inserter(next));
    acc = std::move(next);
  }
  return acc.size();
}

std::size_t secure_intersection_size(net::Network& net, std::span<const PartyId> parties,
                                     const std::vector<std::vector<u128>>& sets,
                                     const SetProtocolOptions& opts,
                                     std::span<const PartyId> recipients) {
  const Setup s = phase1_setup(net, parties, sets, opts);
  auto held = phase2(net, parties, padded_inputs(net, parties, sets, s), s, opts.tag);
  const auto all = phase3(net, parties, std::move(held), s, opts.tag, false);
  const std::size_t k = parties.size();
  std::size_t count = 0;
  for (std::size_t a = 0; a < all.size();) {
    std::size_t b = a;
    while (b < all.size() && all[b] == all[a]) ++b;
    if (b - a == k) ++count;
    a = b;
  }
  const std::uint64_t width = std::max<std::uint64_t>(1, std::bit_width(s.agreed));
  announce(net, parties[0], recipients, opts.tag + ":size", {count}, width);
  return count;
}

ClassVerdict secure_union_class_variant(net::Network& net, std::span<const PartyId> parties,
                                        std::span<const ClassVote> votes,
                                        const SetProtocolOptions& opts) {
  if (votes.size() != parties.size()) throw SpecError("one vote per party is required");
  std::vector<std::vector<u128>> dummy_sets(parties.size(), std::vector<u128>{0});
  const Setup s = phase1_setup(net, parties, dummy_sets, opts);
  const auto& g = *s.group;
  const u128 abstain = g.encode(ItemTag::Marker, 1);
  std::vector<std::vector<u128>> held;
  for (const auto& v : votes) {
    switch (v.kind) {
      case ClassVote::Kind::Value: held.push_back({g.encode(ItemTag::Real, v.value)}); break;
      case ClassVote::Kind::Bottom: held.push_back({g.encode(ItemTag::Marker, 0)}); break;
      case ClassVote::Kind::Abstain: held.push_back({abstain}); break;
    }
  }
  held = phase2(net, parties, std::move(held), s, opts.tag);
  auto x = phase3(net, parties, std::move(held), s, opts.tag, true);

  // the public abstain marker travels once around the ring to get every layer
  const std::size_t k = parties.size();
  const std::string mt = opts.tag + ":marker";
  u128 marker = abstain;
  for (std::size_t b = 0; b < k; ++b) {
    if (b > 0) {
      net.tick();
      marker = net.recv(parties[b], parties[b - 1], mt)[0];
    }
    marker = encrypt_raw(s.keys[b], marker);
    net.transcript().charge_cipher(parties[b], 1);
    net.send(parties[b], parties[(b + 1) % k], mt, {marker}, g.bits());
  }
  net.tick();
  marker = net.recv(parties[0], parties[k - 1], mt)[0];
  x.erase(std::remove(x.begin(), x.end(), marker), x.end());

  ClassVerdict verdict;
  if (x.size() != 1) {
    announce(net, parties[0], parties, opts.tag + ":verdict", {0}, 1);
    return verdict;
  }
  const auto plain = decrypt_chain(net, parties, std::move(x), s, opts.tag);
  const auto d = g.decode(plain[0]);
  if (d.tag == ItemTag::Real) {
    verdict.uniform = true;
    verdict.value = d.payload;
    announce(net, parties.back(), parties, opts.tag + ":verdict", {1, d.payload}, 1 + g.bits());
  } else {
    announce(net, parties.back(), parties, opts.tag + ":verdict", {0}, 1);
  }
  return verdict;
}

}  // namespace gridtree::smpc
