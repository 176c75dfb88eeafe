#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gridtree/partynet.hpp"
#include "gridtree/smpc/commutative.hpp"

namespace gridtree::smpc {

using net::PartyId;

/// A party's set after Phase 1: real items plus dummies up to the agreed
/// size, encoded into the cipher group and shuffled.
struct PaddedItemSet {
  std::vector<u128> elements;
  std::size_t real_count = 0;
  std::size_t agreed_size = 0;
};

/// `items` are payloads of real items; they must be distinct.
PaddedItemSet pad_item_set(const CommutativeGroup& group, std::span<const u128> items,
                           std::size_t agreed_size, Rng& rng);

struct SetProtocolOptions {
  std::shared_ptr<const CommutativeGroup> group;
  /// Padded set size; 0 means the largest input set.
  std::size_t agreed_size = 0;
  /// One key per party, e.g. keys shared within a layer. Empty means every
  /// party draws its own key in Phase 1.
  std::vector<CommutativeKey> keys;
  /// Fewer parties raise TooFewParties. Two-party runs are possible but give
  /// no protection against the party that collects the union.
  std::size_t min_parties = 3;
  std::string tag = "union";
};

/// Union of the real items of all sets, announced to every party.
std::vector<u128> secure_union(net::Network& net, std::span<const PartyId> parties,
                               const std::vector<std::vector<u128>>& sets,
                               const SetProtocolOptions& opts);

/// Phases 1 to 3 only: the deduplicated union, still encrypted under every
/// party's key, held by parties[0]. Dummies are still included.
struct EncryptedSet {
  PartyId holder;
  std::vector<u128> elements;  // sorted
};
EncryptedSet secure_union_encrypted(net::Network& net, std::span<const PartyId> parties,
                                    const std::vector<std::vector<u128>>& sets,
                                    const SetProtocolOptions& opts);

/// Number of elements common to all encrypted sets (all under the same keys).
std::size_t encrypted_intersection_size(std::span<const std::vector<u128>* const> sets);

/// |intersection of real items|, announced to `recipients` by parties[0].
std::size_t secure_intersection_size(net::Network& net, std::span<const PartyId> parties,
                                     const std::vector<std::vector<u128>>& sets,
                                     const SetProtocolOptions& opts,
                                     std::span<const PartyId> recipients);

/// Class-label test. Each party votes its sole local class, bottom (mixed
/// classes) or abstains (no local tuples).
struct ClassVote {
  enum class Kind { Value, Bottom, Abstain };
  Kind kind = Kind::Abstain;
  u128 value = 0;  // payload for Kind::Value

  static ClassVote of(u128 v) { return {Kind::Value, v}; }
  static ClassVote bottom() { return {Kind::Bottom, 0}; }
  static ClassVote abstain() { return {Kind::Abstain, 0}; }
};

struct ClassVerdict {
  bool uniform = false;
  u128 value = 0;
};

/// uniform(c) iff, after dropping abstentions, every vote is the class value
/// c. Otherwise the run stops without decrypting anything.
ClassVerdict secure_union_class_variant(net::Network& net, std::span<const PartyId> parties,
                                        std::span<const ClassVote> votes,
                                        const SetProtocolOptions& opts);

}  // namespace gridtree::smpc
