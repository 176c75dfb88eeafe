#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gridtree/dataset.hpp"
#include "gridtree/id3.hpp"
#include "gridtree/protocols.hpp"

namespace gridtree::verify {

using net::PartyId;

/// Worst-case x ln x reconstruction error accepted for one evaluation.
inline constexpr double kXlnxTolerance = 1e-3;

/// Gain gap below which two attributes count as tied for a protocol that
/// compares approximated gains: ten x ln x tolerances, in bits.
double gain_tolerance();

struct VerifyReport {
  bool pass = false;
  bool exact = false;        // candidate equals the oracle tree
  bool margin_safe = false;  // every decision along the candidate had margin > tau
  double min_margin = 0;
  std::vector<std::string> notes;  // near-tie decisions that differ from the oracle
  std::vector<std::string> diffs;  // real disagreements
  nlohmann::json to_json() const;
};

/// Replays ID3 on `rel` along the candidate's own choices. A split differing
/// from the oracle is accepted with a note when its exact gain is within
/// `tau_gain` of the best; anything else is a diff.
VerifyReport verify_tree(const data::Relation& rel, const id3::PlainTree& candidate,
                         double tau_gain = gain_tolerance());

struct AuditFinding {
  PartyId party;
  std::string what;
};

/// Checks that every party's persisted state (its fragment, its payloads)
/// only names attributes, values and class labels of its own fragment (with
/// the value domains its vertical group shares), that
/// only owners hold interior payloads, and that the public skeleton carries
/// no attribute semantics.
std::vector<AuditFinding> audit_visibility(const proto::DistributedTree& tree,
                                           std::vector<data::Fragment> fragments);

}  // namespace gridtree::verify
