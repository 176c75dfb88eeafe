#include <doctest.h>

#include "gridtree/errors.hpp"
#include "gridtree/protocols.hpp"
#include "helpers.hpp"

using namespace gridtree;
using namespace gridtree::proto;

namespace {

struct Setup {
  data::Relation rel;
  data::GridPartition part;
  std::vector<data::Fragment> frags;
  RunResult run;
};

Setup run(Strategy s, const data::Relation& rel, std::size_t v, std::size_t h, std::uint64_t seed = 1) {
  auto part = data::make_partition(rel, v, h, seed);
  auto frags = data::make_fragments(rel, part);
  ProtocolConfig cfg;
  cfg.seed = seed;
  auto r = run_strategy(s, part, frags, cfg);
  return {rel, std::move(part), std::move(frags), std::move(r)};
}

id3::PlainTree oracle(const Setup& s) {
  const auto re = data::reassemble(s.part, s.frags);
  return id3::id3_build(re, id3::default_attributes(re));
}

// Walks the skeleton with every payload in view and counts owner changes.
std::size_t expected_hops(const DistributedTree& t, const std::vector<std::map<std::string, std::string>>& parts) {
  std::size_t hops = 0;
  std::string id = t.root;
  std::size_t group = t.node(id).owner_group;
  for (;;) {
    const auto& n = t.node(id);
    if (n.owner_group != group) ++hops, group = n.owner_group;
    const NodePayload* pl = nullptr;
    for (const auto& [p, m] : t.payloads)
      if (auto it = m.find(id); it != m.end()) pl = &it->second;
    if (std::holds_alternative<LeafPayload>(*pl)) return hops;
    const auto& in = std::get<InteriorPayload>(*pl);
    const auto& val = parts[n.owner_group - 1].at(in.attribute);
    for (const auto& [value, child] : in.branches)
      if (value == val) id = child;
  }
}

}  // namespace

TEST_CASE("horizontal protocol on the weather data") {
  const auto rel = testutil::weather();
  for (std::size_t h : {3, 4, 5}) {
    const auto s = run(Strategy::Horizontal, rel, 1, h);
    CHECK(render_plaintext(s.run.tree, true) == oracle(s));
    CHECK(s.run.tree.v == 1);
  }
}

TEST_CASE("uniform class gives one leaf without gain traffic") {
  const auto rel = testutil::parse("id,a,b,c\n1,x,p,yes\n2,y,q,yes\n3,x,q,yes\n4,y,p,yes\n5,x,p,yes\n6,y,q,yes\n", "id", "c");
  for (auto [s, v, h] : {std::tuple{Strategy::Horizontal, 1, 3}, {Strategy::GridHMerge, 2, 2}, {Strategy::GridVMerge, 2, 2}}) {
    const auto r = run(s, rel, v, h);
    CHECK(render_plaintext(r.run.tree, true) == id3::PlainTree::leaf("yes"));
    CHECK(r.run.transcript.with_tag_prefix("gain:").empty());
  }
}

TEST_CASE("a block without tuples still takes part") {
  const auto rel = testutil::weather();
  auto part = data::make_partition(rel, 1, 3, 1);
  // move every tuple of block 3 into block 1
  for (auto& id : part.tuple_groups[2]) part.tuple_groups[0].push_back(id);
  part.tuple_groups[2].clear();
  const auto frags = data::make_fragments(rel, part);
  const auto r = ppid3_horizontal(part, frags, {});
  CHECK(render_plaintext(r.tree, true) == id3::id3_build(rel, id3::default_attributes(rel)));
}

TEST_CASE("grid strategies match the oracle") {
  const auto rel = data::synthetic_relation({.attributes = 5, .max_values = 3, .tuples = 30}, 3);
  for (auto s : {Strategy::GridHMerge, Strategy::GridVMerge})
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto r = run(s, rel, 3, 3, seed);
      CHECK(render_plaintext(r.run.tree, true) == oracle(r));
    }
  const auto w = testutil::weather();
  const auto a = run(Strategy::GridHMerge, w, 2, 3);
  const auto b = run(Strategy::GridVMerge, w, 2, 3);
  CHECK(render_plaintext(a.run.tree, true) == render_plaintext(b.run.tree, true));
  CHECK(render_plaintext(a.run.tree, true) == oracle(a));
}

TEST_CASE("a perfectly predictive attribute gives a depth-one tree") {
  const auto rel = testutil::parse(
      "id,a,b,c\n1,x,p,yes\n2,y,q,no\n3,x,q,yes\n4,y,p,no\n5,x,p,yes\n6,y,q,no\n7,x,q,yes\n8,y,p,no\n", "id", "c");
  for (auto s : {Strategy::GridHMerge, Strategy::GridVMerge}) {
    const auto r = run(s, rel, 2, 2);
    const auto t = render_plaintext(r.run.tree, true);
    CHECK(t.depth() == 1);
    CHECK(t.attribute == "a");
  }
}

TEST_CASE("configuration errors") {
  const auto rel = testutil::weather();
  auto part = data::make_partition(rel, 2, 1, 1);
  auto frags = data::make_fragments(rel, part);
  CHECK_THROWS_AS(ppid3_grid_hmerge(part, frags, {}), ConfigError);
  CHECK_THROWS_AS(ppid3_grid_vmerge(part, frags, {}), ConfigError);

  part = data::make_partition(rel, 1, 2, 1);
  frags = data::make_fragments(rel, part);
  CHECK_THROWS_AS(ppid3_horizontal(part, frags, {}), TooFewParties);

  part = data::make_partition(rel, 2, 2, 1);
  frags = data::make_fragments(rel, part);
  for (auto& f : frags) f.owner.i = 3 - f.owner.i;  // class block now first
  CHECK_THROWS_AS(ppid3_grid_hmerge(part, frags, {}), ConfigError);

  frags = data::make_fragments(rel, part);
  frags.pop_back();
  CHECK_THROWS_AS(ppid3_grid_vmerge(part, frags, {}), IncompleteGrid);

  ProtocolConfig bad;
  bad.key_bits = 8;
  CHECK_THROWS_AS(ppid3_grid_hmerge(part, data::make_fragments(rel, part), bad), ConfigError);
  CHECK_THROWS_AS(strategy_from_string("diagonal"), ConfigError);
  CHECK(strategy_from_string(to_string(Strategy::GridVMerge)) == Strategy::GridVMerge);
}

TEST_CASE("runs are deterministic") {
  const auto rel = testutil::weather();
  const auto a = run(Strategy::GridVMerge, rel, 2, 2, 7);
  const auto b = run(Strategy::GridVMerge, rel, 2, 2, 7);
  CHECK(a.run.transcript == b.run.transcript);
  CHECK(a.run.tree.run_id == b.run.tree.run_id);
}

TEST_CASE("distributed classification") {
  const auto rel = testutil::weather();
  const auto s = run(Strategy::GridHMerge, rel, 2, 2);
  const auto plain = render_plaintext(s.run.tree, true);
  for (const auto& row : rel.tuples) {
    const auto parts = split_tuple(rel, s.part, row);
    for (std::size_t layer = 1; layer <= 2; ++layer) {
      const auto c = classify_distributed(s.run.tree, layer, parts);
      CHECK(c.label == row[rel.class_column()]);
      CHECK(c.label == id3::classify_plain(plain, rel.schema, row));
      CHECK(c.hops == expected_hops(s.run.tree, parts));
      CHECK(c.transcript.entries().size() == c.hops);
    }
  }

  const auto h = run(Strategy::Horizontal, rel, 1, 3);
  for (const auto& row : rel.tuples) CHECK(classify_distributed(h.run.tree, 2, split_tuple(rel, h.part, row)).hops == 0);

  const auto parts = split_tuple(rel, s.part, rel.tuples[0]);
  CHECK_THROWS_AS(classify_distributed(s.run.tree, 3, parts), ConfigError);
  auto odd = parts;
  for (auto& m : odd)
    if (m.count("outlook")) m["outlook"] = "foggy";
  CHECK_THROWS_AS(classify_distributed(s.run.tree, 1, odd), UnseenValue);

  auto broken = s.run.tree;
  for (auto& [p, m] : broken.payloads) m.erase(broken.root);
  CHECK_THROWS_AS(classify_distributed(broken, 1, parts), DanglingNode);
}

TEST_CASE("plaintext rendering") {
  const auto rel = testutil::weather();
  const auto s = run(Strategy::GridVMerge, rel, 2, 2);
  CHECK_THROWS_AS(render_plaintext(s.run.tree, false), Forbidden);

  auto partial = s.run.tree;
  for (auto& [p, m] : partial.payloads)
    if (p.i == 1) m.clear();
  const auto t = render_plaintext(partial, true);
  const auto full = render_plaintext(s.run.tree, true);
  CHECK(t.node_count() == full.node_count());
  CHECK(id3::render_text(t).find('#') != std::string::npos);

  std::vector<nlohmann::json> payloads;
  for (const auto& [p, m] : s.run.tree.payloads) payloads.push_back(payload_to_json(s.run.tree, p));
  const auto back = tree_from_json(skeleton_to_json(s.run.tree), payloads);
  CHECK(render_plaintext(back, true) == full);
  CHECK(back.depth() == s.run.tree.depth());
  CHECK_THROWS_AS(tree_from_json(nlohmann::json::object(), {}), SchemaError);
}
