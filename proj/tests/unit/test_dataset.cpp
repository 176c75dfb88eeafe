#include <doctest.h>

#include <algorithm>
#include <set>

#include "gridtree/dataset.hpp"
#include "gridtree/errors.hpp"
#include "helpers.hpp"

using namespace gridtree;
using namespace gridtree::data;

TEST_CASE("sample item set loads with five attributes plus the class") {
  const auto rel = load_relation(GRIDTREE_DATA_DIR "/table1.csv", "Cust. nr.", "Fraudulent?");
  CHECK(rel.size() == 2);
  CHECK(rel.schema.size() == 7);
  CHECK(rel.attribute_columns().size() == 5);
  CHECK(rel.class_attr == "Fraudulent?");
  CHECK(rel.domain(rel.class_column()) == std::vector<std::string>{"no", "yes"});
}

TEST_CASE("single-row relation has singleton domains") {
  const auto rel = testutil::parse("id,a,b,c\n1,x,y,z\n", "id", "c");
  CHECK(rel.size() == 1);
  for (std::size_t c = 0; c < rel.schema.size(); ++c) CHECK(rel.domain(c).size() == 1);
}

TEST_CASE("loading rejects bad inputs") {
  CHECK_THROWS_AS(testutil::parse("id,a,c\nA11,x,y\nA11,z,w\n", "id", "c"), DuplicateKey);
  CHECK_THROWS_AS(testutil::parse("id,a,c\n1,x,y\n", "id", "missing"), SchemaError);
  CHECK_THROWS_AS(testutil::parse("", "id", "c"), EmptyInput);
  CHECK_THROWS_AS(load_relation("/nonexistent/file.csv", "id", "c"), Error);
}

TEST_CASE("partition shapes") {
  const auto rel = testutil::weather();
  const auto hp = make_partition(rel, 1, 2, 1);
  CHECK(hp.horizontal());
  CHECK(hp.tuple_groups.size() == 2);
  const auto vp = make_partition(rel, 2, 1, 1);
  CHECK(vp.vertical());
  CHECK(vp.attr_groups.back().back() == "play");

  const auto syn = synthetic_relation({.attributes = 4, .tuples = 30}, 5);  // 5 non-key attributes
  const auto gp = make_partition(syn, 3, 3, 2);
  const auto frags = make_fragments(syn, gp);
  CHECK(frags.size() == 9);
  for (const auto& f : frags) {
    CHECK(f.columns.front() == "id");
    CHECK(f.has_class() == (f.owner.i == 3));
  }
  // same columns within a vertical group, same ids within a horizontal group
  for (const auto& a : frags)
    for (const auto& b : frags) {
      if (a.owner.i == b.owner.i) CHECK(a.columns == b.columns);
      if (a.owner.j == b.owner.j) CHECK(a.ids() == b.ids());
    }
}

TEST_CASE("partition bounds") {
  const auto rel = testutil::weather();
  CHECK_THROWS_AS(make_partition(rel, 5, 2, 1), PartitionError);
  CHECK_THROWS_AS(make_partition(rel, 0, 2, 1), PartitionError);
  CHECK_THROWS_AS(make_partition(rel, 2, 15, 1), PartitionError);
  CHECK_NOTHROW(make_partition(rel, 4, 14, 1));
}

TEST_CASE("reassembly reproduces the relation") {
  const auto rel = testutil::weather();
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (auto [v, h] : {std::pair{1, 1}, {1, 3}, {2, 2}, {3, 4}, {4, 14}}) {
      const auto part = make_partition(rel, v, h, seed);
      validate_partition(rel, part);
      CHECK(equivalent(reassemble(part, make_fragments(rel, part)), rel));
    }
  const auto syn = synthetic_relation({.attributes = 4, .max_values = 3, .tuples = 20}, 11);
  const auto part = make_partition(syn, 2, 3, 4);
  CHECK(equivalent(reassemble(part, make_fragments(syn, part)), syn));
}

TEST_CASE("tuple blocks are disjoint and exhaustive") {
  const auto rel = testutil::weather();
  const auto part = make_partition(rel, 2, 4, 9);
  std::multiset<std::string> ids;
  for (const auto& g : part.tuple_groups) ids.insert(g.begin(), g.end());
  CHECK(ids.size() == rel.size());
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == rel.size());
}

TEST_CASE("missing fragment is reported") {
  const auto rel = testutil::weather();
  const auto part = make_partition(rel, 2, 2, 1);
  auto frags = make_fragments(rel, part);
  frags.pop_back();
  CHECK_THROWS_AS(reassemble(part, frags), IncompleteGrid);
}

TEST_CASE("partition JSON and fragment CSV round trip") {
  const auto rel = testutil::weather();
  const auto part = make_partition(rel, 2, 3, 6);
  const auto back = partition_from_json(to_json(part));
  CHECK(back.attr_groups == part.attr_groups);
  CHECK(back.tuple_groups == part.tuple_groups);
  CHECK(back.seed == part.seed);

  const auto frags = make_fragments(rel, part);
  std::vector<Fragment> read;
  for (const auto& f : frags) {
    std::stringstream s;
    write_fragment_csv(s, f);
    read.push_back(read_fragment_csv(s, f.owner, "day", "play"));
    CHECK(read.back().rows == f.rows);
  }
  CHECK(equivalent(reassemble(part, read), rel));
}

TEST_CASE("group domains are harmonized") {
  const auto rel = testutil::weather();
  const auto part = make_partition(rel, 2, 7, 1);
  auto frags = make_fragments(rel, part);
  std::vector<Fragment> read;
  for (const auto& f : frags) {
    std::stringstream s;
    write_fragment_csv(s, f);
    read.push_back(read_fragment_csv(s, f.owner, "day", "play"));
  }
  harmonize_domains(read);
  for (const auto& f : read)
    if (f.has_class()) CHECK(f.domains[f.column("play")] == std::vector<std::string>{"no", "yes"});
}

TEST_CASE("attribute ranks follow the reassembled schema") {
  const auto rel = testutil::weather();
  const auto part = make_partition(rel, 2, 2, 1);
  const auto ranks = attribute_ranks(part);
  const auto re = reassemble(part, make_fragments(rel, part));
  for (std::size_t i = 0; i < part.v; ++i)
    for (std::size_t a = 0; a < part.attr_groups[i].size(); ++a)
      CHECK(re.schema[ranks[i][a]] == part.attr_groups[i][a]);
}

TEST_CASE("synthetic relations are seeded") {
  const SyntheticSpec spec{.attributes = 5, .max_values = 3, .classes = 3, .tuples = 40};
  const auto a = synthetic_relation(spec, 7);
  const auto b = synthetic_relation(spec, 7);
  CHECK(a.tuples == b.tuples);
  CHECK(a.size() == 40);
  CHECK(a.attribute_columns().size() == 5);
  for (auto c : a.attribute_columns()) CHECK(a.domain(c).size() <= 3);
  CHECK(synthetic_relation(spec, 8).tuples != a.tuples);
}
