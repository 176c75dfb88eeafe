#pragma once

// Shared scaffolding for the tree protocols: each party's local view of its
// fragment, node contexts and the tree under construction.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gridtree/protocols.hpp"
#include "gridtree/smpc/circuits.hpp"
#include "gridtree/smpc/commutative.hpp"
#include "gridtree/smpc/secure_sum.hpp"
#include "gridtree/smpc/set_ops.hpp"

namespace gridtree::proto::detail {

using Rows = std::vector<std::uint32_t>;

/// What party P_ij knows: its fragment, encoded.
struct PartyData {
  PartyId id;
  const data::Fragment* frag = nullptr;
  std::vector<std::size_t> attr_cols;  // split candidates, fragment columns
  std::vector<std::uint64_t> ranks;    // aligned with attr_cols
  std::optional<std::size_t> class_col;
  std::vector<smpc::u128> items;                // encoded row identifiers
  std::vector<std::vector<std::uint32_t>> codes;  // codes[col][row] = domain index

  std::size_t domain_size(std::size_t col) const { return frag->domains[col].size(); }
  const std::string& value(std::size_t col, std::size_t code) const { return frag->domains[col][code]; }
  const std::string& attr_name(std::size_t a) const { return frag->columns[attr_cols[a]]; }

  Rows all_rows() const;
  Rows filter(const Rows& rows, std::size_t col, std::uint32_t code) const;
  std::vector<smpc::u128> ids(const Rows& rows) const;
  std::vector<std::uint64_t> class_counts(const Rows& rows) const;
};

struct Grid {
  std::size_t v = 1;
  std::size_t h = 1;
  std::size_t total_tuples = 0;
  std::size_t max_fragment = 0;
  std::vector<PartyData> parties;  // (i-1)*h + (j-1)
  std::vector<std::string> class_domain;
  std::shared_ptr<const smpc::CommutativeGroup> group;
  ProtocolConfig cfg;
  std::vector<data::Fragment> fragments;  // harmonized copies

  PartyData& at(std::size_t i, std::size_t j) { return parties[(i - 1) * h + (j - 1)]; }
  const PartyData& at(std::size_t i, std::size_t j) const { return parties[(i - 1) * h + (j - 1)]; }
  std::size_t index(std::size_t i, std::size_t j) const { return (i - 1) * h + (j - 1); }

  std::vector<PartyId> group_parties(std::size_t i) const;
  std::vector<PartyId> layer_parties(std::size_t j) const;
  std::vector<PartyId> all_parties() const;

  std::size_t agreed_size() const;
  smpc::SumDomain count_domain() const { return smpc::SumDomain::above(total_tuples); }
  smpc::FixedPointConfig fixed_point() const;
  // circuits are billed per count-sized input word, whatever the share ring
  smpc::CircuitCost circuit_cost() const { return {cfg.key_bits, count_domain().bits()}; }
};

/// Validates the partition/fragments pair and encodes every fragment.
Grid make_grid(const data::GridPartition& part, const std::vector<data::Fragment>& fragments,
               const ProtocolConfig& cfg);

void check_grid(const data::GridPartition& part);
std::vector<Rows> initial_context(const Grid& g);
std::vector<std::vector<std::size_t>> initial_remaining(const Grid& g);

/// Public test whether any vertical group still has split attributes, run by
/// the layer-1 representatives through a secure sum and an is-zero circuit.
bool attributes_left(const Grid& g, net::Network& net,
                     const std::vector<std::vector<std::size_t>>& remaining);

/// Collects the tree while a protocol recurses.
class TreeBuilder {
 public:
  TreeBuilder(std::string run_id, std::size_t v, std::size_t h);

  std::string child_id(const std::string& parent, std::size_t ordinal) const;
  const std::string& root_id() const { return root_; }

  void leaf(const std::string& id, std::size_t owner_group, const std::string& label,
            const std::vector<PartyId>& holders);
  void interior(const std::string& id, std::size_t owner_group, const std::string& attribute,
                const std::vector<std::string>& values, const std::vector<PartyId>& holders);

  DistributedTree take() { return std::move(tree_); }

 private:
  DistributedTree tree_;
  std::string root_;
};

}  // namespace gridtree::proto::detail
