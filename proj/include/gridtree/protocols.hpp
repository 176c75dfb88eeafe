#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gridtree/dataset.hpp"
#include "gridtree/id3.hpp"
#include "gridtree/partynet.hpp"
#include "gridtree/smpc/fixed_point.hpp"

namespace gridtree::proto {

using net::PartyId;

enum class Strategy { Horizontal, GridHMerge, GridVMerge };
std::string to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct ProtocolConfig {
  std::uint64_t seed = 1;
  unsigned key_bits = 128;
  unsigned taylor_terms = 10;
  unsigned fixed_point_bits = 32;
  smpc::LnSeries series = smpc::LnSeries::Atanh;
  /// Set sizes are padded to the total tuple count, or to the largest
  /// fragment when MaxFragment is chosen.
  enum class Padding { TotalTuples, MaxFragment };
  Padding padding = Padding::TotalTuples;
};

struct InteriorPayload {
  std::string attribute;
  std::vector<std::pair<std::string, std::string>> branches;  // value -> child nodeID
  friend bool operator==(const InteriorPayload&, const InteriorPayload&) = default;
};
struct LeafPayload {
  std::string label;
  friend bool operator==(const LeafPayload&, const LeafPayload&) = default;
};
using NodePayload = std::variant<InteriorPayload, LeafPayload>;

/// Public part of a node: who owns it and where its children are.
struct SkeletonNode {
  std::string id;
  std::size_t owner_group = 1;  // vertical group i
  std::vector<std::string> children;
};

/// Tree learned by a protocol run. The skeleton is public; each party keeps
/// payloads only for the nodes its vertical group owns (interior) or, for
/// class holders, the leaves.
struct DistributedTree {
  std::string run_id;
  std::size_t v = 1;
  std::size_t h = 1;
  std::string root;
  std::vector<SkeletonNode> nodes;  // depth-first order
  std::map<PartyId, std::map<std::string, NodePayload>> payloads;

  const SkeletonNode& node(const std::string& id) const;
  bool has_node(const std::string& id) const;
  std::size_t depth() const;
};

nlohmann::json skeleton_to_json(const DistributedTree& tree);
nlohmann::json payload_to_json(const DistributedTree& tree, PartyId party);
/// Rebuilds a tree from its skeleton and whatever payload files are given.
DistributedTree tree_from_json(const nlohmann::json& skeleton,
                               const std::vector<nlohmann::json>& payloads);

struct RunResult {
  DistributedTree tree;
  net::Transcript transcript;
};

/// k = h > 2 parties each holding all attributes of a share of the tuples.
RunResult ppid3_horizontal(const data::GridPartition& part, const std::vector<data::Fragment>& fragments,
                           const ProtocolConfig& cfg);
/// Grid data: merge each vertical group horizontally by encrypted unions,
/// then develop vertically.
RunResult ppid3_grid_hmerge(const data::GridPartition& part, const std::vector<data::Fragment>& fragments,
                            const ProtocolConfig& cfg);
/// Grid data: merge each horizontal layer vertically by intersection sizes,
/// then sum counts over the layers.
RunResult ppid3_grid_vmerge(const data::GridPartition& part, const std::vector<data::Fragment>& fragments,
                            const ProtocolConfig& cfg);

RunResult run_strategy(Strategy s, const data::GridPartition& part,
                       const std::vector<data::Fragment>& fragments, const ProtocolConfig& cfg);

struct Classification {
  std::string label;
  std::size_t hops = 0;
  net::Transcript transcript;
};

/// Classifies a tuple spread over the parties of horizontal layer `layer`.
/// `parts[i-1]` maps the attributes of vertical group i to the tuple's
/// values. Control moves between owners; each change is one message.
Classification classify_distributed(const DistributedTree& tree, std::size_t layer,
                                    const std::vector<std::map<std::string, std::string>>& parts,
                                    const std::string& start = "");

/// Splits a tuple of `rel` into per-group attribute maps following `part`.
std::vector<std::map<std::string, std::string>> split_tuple(const data::Relation& rel,
                                                            const data::GridPartition& part,
                                                            const data::Row& row);

/// Joins all payloads into a plain tree; nodes nobody holds a payload for
/// render as opaque "#<nodeID>". Throws Forbidden unless `test_mode`.
id3::PlainTree render_plaintext(const DistributedTree& tree, bool test_mode);

}  // namespace gridtree::proto
