#include "gridtree/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "gridtree/errors.hpp"

namespace gridtree::verify {

double gain_tolerance() { return 10 * kXlnxTolerance / std::log(2.0); }

nlohmann::json VerifyReport::to_json() const {
  return {{"pass", pass},   {"exact", exact}, {"margin_safe", margin_safe},
          {"min_margin", std::isinf(min_margin) ? nlohmann::json(nullptr) : nlohmann::json(min_margin)},
          {"notes", notes}, {"diffs", diffs}};
}

namespace {

class Replay {
 public:
  Replay(const data::Relation& rel, double tau, VerifyReport& out) : rel_(rel), tau_(tau), out_(out) {}

  void run(const std::vector<std::size_t>& rows, std::vector<std::size_t> attrs, std::size_t parent_majority,
           const id3::PlainTree& t, const std::string& path) {
    const auto& classes = rel_.domain(rel_.class_column());
    if (rows.empty()) return expect_leaf(t, classes[parent_majority], path);
    const auto hist = id3::histogram(rel_, rows);
    if (attrs.empty() || hist.distinct() == 1) return expect_leaf(t, classes[hist.majority()], path);

    const auto d = id3::evaluate_split(rel_, rows, attrs);
    const double best = d.gains[d.chosen];
    if (t.is_leaf()) return diff(path, "leaf '" + t.label + "' where the oracle splits on " + rel_.schema[d.candidates[d.chosen]]);
    if (!rel_.has_column(t.attribute)) return diff(path, "unknown attribute '" + t.attribute + "'");
    const std::size_t col = rel_.column(t.attribute);
    const auto pos = std::find(d.candidates.begin(), d.candidates.end(), col);
    if (pos == d.candidates.end()) return diff(path, "attribute '" + t.attribute + "' is not available here");
    const std::size_t k = static_cast<std::size_t>(pos - d.candidates.begin());

    const double margin = d.margin();
    out_.min_margin = std::min(out_.min_margin, margin);
    if (margin <= tau_) out_.margin_safe = false;
    if (k != d.chosen) {
      const double gap = best - d.gains[k];
      std::ostringstream msg;
      msg << "split on " << t.attribute << " instead of " << rel_.schema[d.candidates[d.chosen]] << ", gain gap " << gap;
      if (gap <= tau_) {
        out_.notes.push_back(path + ": " + msg.str());
      } else {
        return diff(path, msg.str());
      }
    } else if (margin <= tau_) {
      std::ostringstream msg;
      msg << path << ": near tie on " << t.attribute << ", margin " << margin;
      out_.notes.push_back(msg.str());
    }

    const auto& dom = rel_.domain(col);
    if (t.children.size() != dom.size()) return diff(path, "branch count differs from the domain of " + t.attribute);
    std::vector<std::vector<std::size_t>> parts(dom.size());
    for (auto r : rows) {
      const auto& val = rel_.tuples[r][col];
      parts[static_cast<std::size_t>(std::lower_bound(dom.begin(), dom.end(), val) - dom.begin())].push_back(r);
    }
    attrs.erase(std::find(attrs.begin(), attrs.end(), col));
    for (std::size_t b = 0; b < dom.size(); ++b) {
      if (t.children[b].value != dom[b]) {
        diff(path, "branch " + std::to_string(b) + " has value '" + t.children[b].value + "'");
        continue;
      }
      run(parts[b], attrs, hist.majority(), t.children[b].child, path + "/" + t.attribute + "=" + dom[b]);
    }
  }

 private:
  const data::Relation& rel_;
  double tau_;
  VerifyReport& out_;

  void expect_leaf(const id3::PlainTree& t, const std::string& label, const std::string& path) {
    if (!t.is_leaf()) return diff(path, "split on " + t.attribute + " where the oracle has leaf '" + label + "'");
    if (t.label != label) diff(path, "leaf '" + t.label + "', expected '" + label + "'");
  }
  void diff(const std::string& path, const std::string& what) { out_.diffs.push_back(path + ": " + what); }
};

}  // namespace

VerifyReport verify_tree(const data::Relation& rel, const id3::PlainTree& candidate, double tau_gain) {
  VerifyReport r;
  r.margin_safe = true;
  r.min_margin = std::numeric_limits<double>::infinity();
  if (rel.size() == 0) throw EmptyTraining("cannot verify against an empty relation");
  const auto names = id3::default_attributes(rel);
  std::vector<std::size_t> attrs;
  for (const auto& a : names) attrs.push_back(rel.column(a));
  std::sort(attrs.begin(), attrs.end());
  std::vector<std::size_t> rows(rel.size());
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = k;
  Replay(rel, tau_gain, r).run(rows, attrs, 0, candidate, "root");
  r.exact = candidate == id3::id3_build(rel, names);
  r.pass = r.diffs.empty();
  return r;
}

std::vector<AuditFinding> audit_visibility(const proto::DistributedTree& tree,
                                           std::vector<data::Fragment> fragments) {
  // value domains are metadata shared within a vertical group
  data::harmonize_domains(fragments);
  std::vector<AuditFinding> out;
  std::map<PartyId, const data::Fragment*> own;
  std::set<std::string> all_names;
  for (const auto& f : fragments) {
    own[PartyId{static_cast<std::uint32_t>(f.owner.i), static_cast<std::uint32_t>(f.owner.j)}] = &f;
    for (std::size_t c = 1; c < f.columns.size(); ++c) all_names.insert(f.columns[c]);
  }

  // skeleton: ids, owner groups and child links only
  const auto skel = proto::skeleton_to_json(tree).dump();
  for (const auto& name : all_names)
    if (skel.find("\"" + name + "\"") != std::string::npos)
      out.push_back({PartyId::ideal(), "public skeleton names attribute '" + name + "'"});

  for (const auto& [party, nodes] : tree.payloads) {
    auto it = own.find(party);
    if (it == own.end()) {
      out.push_back({party, "holds payloads but owns no fragment"});
      continue;
    }
    const data::Fragment& f = *it->second;
    for (const auto& [id, pl] : nodes) {
      if (!tree.has_node(id)) {
        out.push_back({party, "payload for unknown node '" + id + "'"});
        continue;
      }
      const auto& node = tree.node(id);
      if (const auto* leaf = std::get_if<proto::LeafPayload>(&pl)) {
        if (!f.has_class()) {
          out.push_back({party, "knows leaf label of '" + id + "' without holding the class"});
          continue;
        }
        const auto& dom = f.domains[f.column(f.class_attr)];
        if (std::find(dom.begin(), dom.end(), leaf->label) == dom.end())
          out.push_back({party, "leaf label '" + leaf->label + "' is not in its class domain"});
        continue;
      }
      const auto& in = std::get<proto::InteriorPayload>(pl);
      if (node.owner_group != f.owner.i) out.push_back({party, "holds the split of '" + id + "' owned by another group"});
      const auto col = std::find(f.columns.begin() + 1, f.columns.end(), in.attribute);
      if (col == f.columns.end() || in.attribute == f.class_attr) {
        out.push_back({party, "split attribute '" + in.attribute + "' is foreign"});
        continue;
      }
      const auto& dom = f.domains[static_cast<std::size_t>(col - f.columns.begin())];
      for (const auto& [value, child] : in.branches)
        if (std::find(dom.begin(), dom.end(), value) == dom.end())
          out.push_back({party, "branch value '" + value + "' of '" + in.attribute + "' is foreign"});
    }
  }
  return out;
}

}  // namespace gridtree::verify
