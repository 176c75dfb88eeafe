#include <doctest.h>

#include <cmath>
#include <map>

#include "gridtree/errors.hpp"
#include "gridtree/id3.hpp"
#include "gridtree/rng.hpp"
#include "helpers.hpp"

using namespace gridtree;
using namespace gridtree::id3;

TEST_CASE("entropy") {
  CHECK(entropy({8, 0}) == doctest::Approx(0.0));
  CHECK(entropy({7, 7}) == doctest::Approx(1.0));
  CHECK(entropy({9, 5}) == doctest::Approx(0.940285959).epsilon(1e-9));
  CHECK(entropy({0, 0}) == 0.0);
  CHECK(entropy({1, 1, 1, 1}) == doctest::Approx(2.0));
}

TEST_CASE("information gain") {
  const ClassHistogram parent{9, 5};
  const std::vector<ClassHistogram> outlook{{2, 3}, {4, 0}, {3, 2}};
  CHECK(info_gain(parent, outlook) == doctest::Approx(0.246749820).epsilon(1e-9));
  const std::vector<ClassHistogram> pure{{9, 0}, {0, 5}};
  CHECK(info_gain(parent, pure) == doctest::Approx(entropy(parent)));
  const std::vector<ClassHistogram> same{{9, 5}};
  CHECK(info_gain(parent, same) == doctest::Approx(0.0));
  const std::vector<ClassHistogram> bad{{1, 1}};
  CHECK_THROWS_AS(info_gain(parent, bad), HistogramMismatch);
}

TEST_CASE("majority ties go to the lower class index") {
  CHECK(ClassHistogram{3, 3}.majority() == 0);
  CHECK(ClassHistogram{1, 4, 4}.majority() == 1);
  CHECK(ClassHistogram{0, 2, 0}.distinct() == 1);
}

TEST_CASE("weather tree") {
  const auto rel = testutil::weather();
  const auto t = id3_build(rel, default_attributes(rel));
  CHECK(render_text(t) ==
        "outlook = overcast\n"
        "  -> yes\n"
        "outlook = rainy\n"
        "  windy = false\n"
        "    -> yes\n"
        "  windy = true\n"
        "    -> no\n"
        "outlook = sunny\n"
        "  humidity = high\n"
        "    -> no\n"
        "  humidity = normal\n"
        "    -> yes\n");
  CHECK(t.depth() == 2);
  for (const auto& row : rel.tuples) CHECK(classify_plain(t, rel.schema, row) == row[rel.class_column()]);
  CHECK(plain_tree_from_json(to_json(t)) == t);
}

TEST_CASE("leaf cases") {
  const auto uniform = testutil::parse("id,a,c\n1,x,yes\n2,y,yes\n", "id", "c");
  CHECK(id3_build(uniform, default_attributes(uniform)) == PlainTree::leaf("yes"));
  const auto mixed = testutil::parse("id,a,c\n1,x,yes\n2,y,no\n3,x,yes\n4,y,yes\n", "id", "c");
  CHECK(id3_build(mixed, {}) == PlainTree::leaf("yes"));
  auto empty = mixed;
  empty.tuples.clear();
  CHECK_THROWS_AS(id3_build(empty, default_attributes(empty)), EmptyTraining);
}

TEST_CASE("classification errors") {
  const auto rel = testutil::weather();
  const auto t = id3_build(rel, default_attributes(rel));
  CHECK(classify_plain(PlainTree::leaf("z"), {}) == "z");
  CHECK_THROWS_AS(classify_plain(t, {{"outlook", "foggy"}}), UnseenValue);
  CHECK_THROWS_AS(classify_plain(t, {{"windy", "true"}}), UnseenValue);
}

namespace {

// Straight recursion over rows and attribute names, sharing no code with the
// library beyond the relation type.
double h2(const std::map<std::string, int>& counts, int n) {
  double e = 0;
  for (const auto& [k, c] : counts)
    if (c) e -= double(c) / n * std::log2(double(c) / n);
  return e;
}

PlainTree brute(const data::Relation& rel, const std::vector<std::size_t>& rows, std::vector<std::size_t> attrs,
                const std::string& parent_major) {
  const std::size_t cc = rel.class_column();
  const auto& classes = rel.domains[cc];
  if (rows.empty()) return PlainTree::leaf(parent_major);
  std::map<std::string, int> cnt;
  for (auto r : rows) ++cnt[rel.tuples[r][cc]];
  std::string major = classes[0];
  int best_c = -1;
  for (const auto& c : classes)
    if (cnt[c] > best_c) best_c = cnt[c], major = c;
  if (attrs.empty() || best_c == int(rows.size())) return PlainTree::leaf(major);
  const double base = h2(cnt, int(rows.size()));
  std::size_t pick = attrs[0];
  double pick_gain = -1;
  for (auto a : attrs) {
    double g = base;
    for (const auto& val : rel.domains[a]) {
      std::map<std::string, int> sub;
      int n = 0;
      for (auto r : rows)
        if (rel.tuples[r][a] == val) ++sub[rel.tuples[r][cc]], ++n;
      if (n) g -= double(n) / rows.size() * h2(sub, n);
    }
    if (g > pick_gain + 1e-12) pick_gain = g, pick = a;
  }
  PlainTree t;
  t.kind = PlainTree::Kind::Interior;
  t.attribute = rel.schema[pick];
  attrs.erase(std::find(attrs.begin(), attrs.end(), pick));
  for (const auto& val : rel.domains[pick]) {
    std::vector<std::size_t> sub;
    for (auto r : rows)
      if (rel.tuples[r][pick] == val) sub.push_back(r);
    t.children.push_back({val, brute(rel, sub, attrs, major)});
  }
  return t;
}

}  // namespace

TEST_CASE("id3 matches a brute-force recursion on small relations") {
  Rng rng(42);
  for (int c = 0; c < 200; ++c) {
    data::SyntheticSpec s;
    s.attributes = 1 + rng.below(5);
    s.max_values = 2 + rng.below(2);
    s.classes = 2 + rng.below(2);
    s.tuples = 1 + rng.below(60);
    s.noise = 0.3;
    const auto rel = data::synthetic_relation(s, 1000 + c);
    std::vector<std::size_t> rows(rel.size()), attrs = rel.attribute_columns();
    for (std::size_t k = 0; k < rows.size(); ++k) rows[k] = k;
    const auto expect = brute(rel, rows, attrs, "");
    CHECK(id3_build(rel, default_attributes(rel)) == expect);
  }
}

TEST_CASE("gain is never negative and no attribute repeats on a path") {
  for (int c = 0; c < 50; ++c) {
    const auto rel = data::synthetic_relation({.attributes = 5, .max_values = 3, .tuples = 80, .noise = 0.4}, 77 + c);
    std::vector<Decision> trace;
    const auto t = id3_build(rel, default_attributes(rel), &trace);
    for (const auto& d : trace)
      for (double g : d.gains) CHECK(g >= -1e-12);
    CHECK(t.depth() <= 5);
  }
}
