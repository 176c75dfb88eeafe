#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridtree/partynet.hpp"
#include "gridtree/smpc/modarith.hpp"

namespace gridtree::smpc {

using net::PartyId;

/// Z_m for a power-of-two modulus m = 2^bits, 1 <= bits <= 64.
class SumDomain {
 public:
  explicit SumDomain(unsigned bits);
  /// Smallest power of two strictly greater than `bound`.
  static SumDomain above(std::uint64_t bound);
  static SumDomain ring64() { return SumDomain(64); }

  unsigned bits() const { return bits_; }
  u128 modulus() const { return u128{1} << bits_; }
  std::uint64_t mask() const { return bits_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits_) - 1; }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const { return (a + b) & mask(); }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return (a - b) & mask(); }
  std::uint64_t neg(std::uint64_t a) const { return (0 - a) & mask(); }
  bool contains(std::uint64_t a) const { return (a & ~mask()) == 0; }

  friend bool operator==(const SumDomain&, const SumDomain&) = default;

 private:
  unsigned bits_;
};

/// Ring secure sum. parties[0] draws the mask r, each party adds its input
/// and forwards, parties[0] removes r and announces the result.
std::uint64_t secure_sum(net::Network& net, std::span<const PartyId> parties,
                         std::span<const std::uint64_t> inputs, SumDomain domain,
                         const std::string& tag = "sum");

/// The sum left as two additive shares: the last party of the ring holds
/// sum + r, the first holds -r.
/// secure_sum with the initiator's mask given explicitly; secure_sum draws it
/// from parties[0]'s stream.
std::uint64_t secure_sum_masked(net::Network& net, std::span<const PartyId> parties,
                                std::span<const std::uint64_t> inputs, SumDomain domain,
                                std::uint64_t mask, const std::string& tag = "sum");

struct SumShares {
  PartyId alice;  // last party
  std::uint64_t masked = 0;
  PartyId bob;  // first party
  std::uint64_t neg_mask = 0;
  SumDomain domain{64};

  std::uint64_t reconstruct() const { return domain.add(masked, neg_mask); }
};

SumShares secure_sum_shares(net::Network& net, std::span<const PartyId> parties,
                            std::span<const std::uint64_t> inputs, SumDomain domain,
                            const std::string& tag = "sum");

/// Same as secure_sum_shares for three or more parties; with exactly two the
/// inputs are already additive shares and nothing is exchanged.
SumShares sum_to_shares(net::Network& net, std::span<const PartyId> parties,
                        std::span<const std::uint64_t> inputs, SumDomain domain,
                        const std::string& tag);

/// Random additive split of `value` into `parts` summands mod m.
std::vector<std::uint64_t> split_value(std::uint64_t value, std::size_t parts, SumDomain domain,
                                       Rng& rng);

/// Ring order for round `round` of the split variant: stride s_r (the r-th
/// integer in [1, k) coprime to k) starting at party r mod k.
std::vector<std::size_t> split_ring_order(std::size_t k, std::size_t round);

/// Each party splits its input into `n_splits` parts; round r sums the r-th
/// parts over a different ring order. The result is announced to all.
std::uint64_t split_secure_sum(net::Network& net, std::span<const PartyId> parties,
                               std::span<const std::uint64_t> inputs, SumDomain domain,
                               std::size_t n_splits, const std::string& tag = "ssum");

}  // namespace gridtree::smpc
