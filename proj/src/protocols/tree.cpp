#include <algorithm>
#include <functional>
#include <map>

#include "gridtree/errors.hpp"
#include "gridtree/protocols.hpp"

namespace gridtree::proto {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Horizontal: return "horizontal";
    case Strategy::GridHMerge: return "grid-hmerge";
    case Strategy::GridVMerge: return "grid-vmerge";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "horizontal") return Strategy::Horizontal;
  if (s == "grid-hmerge") return Strategy::GridHMerge;
  if (s == "grid-vmerge") return Strategy::GridVMerge;
  throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

RunResult run_strategy(Strategy s, const data::GridPartition& part,
                       const std::vector<data::Fragment>& fragments, const ProtocolConfig& cfg) {
  switch (s) {
    case Strategy::Horizontal: return ppid3_horizontal(part, fragments, cfg);
    case Strategy::GridHMerge: return ppid3_grid_hmerge(part, fragments, cfg);
    case Strategy::GridVMerge: return ppid3_grid_vmerge(part, fragments, cfg);
  }
  throw ConfigError("unknown strategy");
}

const SkeletonNode& DistributedTree::node(const std::string& id) const {
  for (const auto& n : nodes)
    if (n.id == id) return n;
  throw DanglingNode("no node '" + id + "' in the tree");
}

bool DistributedTree::has_node(const std::string& id) const {
  return std::any_of(nodes.begin(), nodes.end(), [&](const SkeletonNode& n) { return n.id == id; });
}

std::size_t DistributedTree::depth() const {
  std::function<std::size_t(const std::string&)> rec = [&](const std::string& id) -> std::size_t {
    std::size_t d = 0;
    for (const auto& c : node(id).children) d = std::max(d, 1 + rec(c));
    return d;
  };
  return root.empty() ? 0 : rec(root);
}

nlohmann::json skeleton_to_json(const DistributedTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes)
    nodes.push_back({{"nodeID", n.id}, {"owner", {{"group", n.owner_group}}}, {"children", n.children}});
  return {{"run_id", tree.run_id}, {"v", tree.v}, {"h", tree.h}, {"root", tree.root}, {"nodes", nodes}};
}

nlohmann::json payload_to_json(const DistributedTree& tree, PartyId party) {
  nlohmann::json nodes = nlohmann::json::object();
  if (auto it = tree.payloads.find(party); it != tree.payloads.end()) {
    for (const auto& [id, pl] : it->second) {
      if (const auto* in = std::get_if<InteriorPayload>(&pl)) {
        nlohmann::json br = nlohmann::json::array();
        for (const auto& [value, child] : in->branches) br.push_back({{"value", value}, {"child", child}});
        nodes[id] = {{"attribute", in->attribute}, {"branches", br}};
      } else {
        nodes[id] = {{"class", std::get<LeafPayload>(pl).label}};
      }
    }
  }
  return {{"party", {{"i", party.i}, {"j", party.j}}}, {"nodes", nodes}};
}

DistributedTree tree_from_json(const nlohmann::json& skeleton, const std::vector<nlohmann::json>& payloads) {
  DistributedTree t;
  try {
    t.run_id = skeleton.at("run_id").get<std::string>();
    t.v = skeleton.at("v").get<std::size_t>();
    t.h = skeleton.at("h").get<std::size_t>();
    t.root = skeleton.at("root").get<std::string>();
    for (const auto& n : skeleton.at("nodes"))
      t.nodes.push_back({n.at("nodeID").get<std::string>(), n.at("owner").at("group").get<std::size_t>(),
                         n.at("children").get<std::vector<std::string>>()});
    for (const auto& p : payloads) {
      const PartyId id{p.at("party").at("i").get<std::uint32_t>(), p.at("party").at("j").get<std::uint32_t>()};
      auto& dst = t.payloads[id];
      for (const auto& [nid, body] : p.at("nodes").items()) {
        if (body.contains("class")) {
          dst[nid] = LeafPayload{body.at("class").get<std::string>()};
        } else {
          InteriorPayload in{body.at("attribute").get<std::string>(), {}};
          for (const auto& b : body.at("branches"))
            in.branches.push_back({b.at("value").get<std::string>(), b.at("child").get<std::string>()});
          dst[nid] = std::move(in);
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed tree JSON: ") + e.what());
  }
  return t;
}

namespace {

const NodePayload* find_payload(const DistributedTree& tree, PartyId p, const std::string& id) {
  auto it = tree.payloads.find(p);
  if (it == tree.payloads.end()) return nullptr;
  auto jt = it->second.find(id);
  return jt == it->second.end() ? nullptr : &jt->second;
}

}  // namespace

Classification classify_distributed(const DistributedTree& tree, std::size_t layer,
                                    const std::vector<std::map<std::string, std::string>>& parts,
                                    const std::string& start) {
  if (layer < 1 || layer > tree.h) throw ConfigError("layer outside the grid");
  if (parts.size() != tree.v) throw ConfigError("one attribute map per vertical group is required");
  std::vector<PartyId> layer_parties;
  for (std::size_t i = 1; i <= tree.v; ++i)
    layer_parties.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(layer)});
  net::Network net(layer_parties, 0);
  Classification out;

  std::string id = start.empty() ? tree.root : start;
  const SkeletonNode* node = &tree.node(id);
  PartyId holder = layer_parties[node->owner_group - 1];
  for (;;) {
    const PartyId owner = layer_parties[node->owner_group - 1];
    if (!(owner == holder)) {
      net.send(holder, owner, "classify:control", {}, 8 * id.size());
      net.tick();
      net.recv(owner, holder, "classify:control");
      holder = owner;
      ++out.hops;
    }
    const NodePayload* pl = find_payload(tree, owner, id);
    if (!pl) throw DanglingNode(owner.str() + " holds no payload for node '" + id + "'");
    if (const auto* leaf = std::get_if<LeafPayload>(pl)) {
      out.label = leaf->label;
      break;
    }
    const auto& in = std::get<InteriorPayload>(*pl);
    const auto& known = parts[node->owner_group - 1];
    auto v = known.find(in.attribute);
    if (v == known.end()) throw UnseenValue("tuple has no value for '" + in.attribute + "'");
    auto b = std::find_if(in.branches.begin(), in.branches.end(),
                          [&](const auto& br) { return br.first == v->second; });
    if (b == in.branches.end())
      throw UnseenValue("value '" + v->second + "' of '" + in.attribute + "' has no branch");
    id = b->second;
    node = &tree.node(id);
  }
  net.check_drained();
  out.transcript = net.transcript();
  return out;
}

std::vector<std::map<std::string, std::string>> split_tuple(const data::Relation& rel,
                                                            const data::GridPartition& part,
                                                            const data::Row& row) {
  std::vector<std::map<std::string, std::string>> out(part.v);
  for (std::size_t i = 0; i < part.v; ++i)
    for (const auto& a : part.attr_groups[i]) out[i][a] = row.at(rel.column(a));
  return out;
}

id3::PlainTree render_plaintext(const DistributedTree& tree, bool test_mode) {
  if (!test_mode) throw Forbidden("plaintext rendering is only available in test mode");
  std::function<id3::PlainTree(const std::string&)> rec = [&](const std::string& id) {
    const SkeletonNode& n = tree.node(id);
    const NodePayload* pl = nullptr;
    for (const auto& [p, nodes] : tree.payloads) {
      auto it = nodes.find(id);
      if (it == nodes.end()) continue;
      if (pl && !(*pl == it->second)) throw DanglingNode("holders disagree on the payload of '" + id + "'");
      pl = &it->second;
    }
    if (!pl) {
      if (n.children.empty()) return id3::PlainTree::leaf("#" + id);
      id3::PlainTree t;
      t.kind = id3::PlainTree::Kind::Interior;
      t.attribute = "#" + id;
      for (std::size_t k = 0; k < n.children.size(); ++k) t.children.push_back({"#" + std::to_string(k), rec(n.children[k])});
      return t;
    }
    if (const auto* leaf = std::get_if<LeafPayload>(pl)) {
      if (!n.children.empty()) throw DanglingNode("leaf payload on interior node '" + id + "'");
      return id3::PlainTree::leaf(leaf->label);
    }
    const auto& in = std::get<InteriorPayload>(*pl);
    if (in.branches.size() != n.children.size())
      throw DanglingNode("payload of '" + id + "' disagrees with the skeleton");
    id3::PlainTree t;
    t.kind = id3::PlainTree::Kind::Interior;
    t.attribute = in.attribute;
    for (const auto& [value, child] : in.branches) {
      if (std::find(n.children.begin(), n.children.end(), child) == n.children.end())
        throw DanglingNode("branch of '" + id + "' points to unknown child '" + child + "'");
      t.children.push_back({value, rec(child)});
    }
    return t;
  };
  return rec(tree.root);
}

}  // namespace gridtree::proto
