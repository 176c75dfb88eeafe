#include <doctest.h>

#include <cmath>

#include "gridtree/costmodel.hpp"
#include "gridtree/errors.hpp"
#include "gridtree/verify.hpp"
#include "helpers.hpp"

using namespace gridtree;

namespace {

// columns a and b are identical, so their gains tie exactly
data::Relation twin() {
  return testutil::parse("id,a,b,c\n1,x,x,yes\n2,y,y,no\n3,x,x,yes\n4,y,y,yes\n5,x,x,yes\n6,y,y,no\n", "id", "c");
}

}  // namespace

TEST_CASE("gain tolerance") {
  CHECK(verify::gain_tolerance() == doctest::Approx(0.0144269504).epsilon(1e-8));
}

TEST_CASE("verify accepts the oracle tree") {
  const auto rel = testutil::weather();
  const auto t = id3::id3_build(rel, id3::default_attributes(rel));
  const auto r = verify::verify_tree(rel, t);
  CHECK(r.pass);
  CHECK(r.exact);
  CHECK(r.margin_safe);
  CHECK(r.diffs.empty());
  CHECK(r.to_json()["pass"] == true);
}

TEST_CASE("verify notes a tied alternative") {
  const auto rel = twin();
  const auto oracle = id3::id3_build(rel, id3::default_attributes(rel));
  CHECK(oracle.attribute == "a");
  auto alt = oracle;
  alt.attribute = "b";
  alt.children[1].child.attribute = "a";
  const auto r = verify::verify_tree(rel, alt);
  CHECK(r.pass);
  CHECK(!r.exact);
  CHECK(!r.margin_safe);
  CHECK(!r.notes.empty());
}

TEST_CASE("verify reports real differences") {
  const auto rel = testutil::weather();
  auto t = id3::id3_build(rel, id3::default_attributes(rel));
  t.children[0].child.label = "no";
  auto r = verify::verify_tree(rel, t);
  CHECK(!r.pass);
  CHECK(!r.diffs.empty());

  auto wrong = id3::id3_build(rel, id3::default_attributes(rel));
  wrong.attribute = "temperature";
  CHECK(!verify::verify_tree(rel, wrong).pass);

  auto empty = rel;
  empty.tuples.clear();
  CHECK_THROWS_AS(verify::verify_tree(empty, t), EmptyTraining);
}

TEST_CASE("visibility audit") {
  const auto rel = testutil::weather();
  const auto part = data::make_partition(rel, 2, 2, 1);
  const auto frags = data::make_fragments(rel, part);
  for (auto s : {proto::Strategy::GridHMerge, proto::Strategy::GridVMerge}) {
    const auto r = proto::run_strategy(s, part, frags, {});
    CHECK(verify::audit_visibility(r.tree, frags).empty());

    // an interior payload held outside the owner group
    auto t = r.tree;
    const auto& root = t.node(t.root);
    const std::uint32_t other = root.owner_group == 1 ? 2 : 1;
    const auto payload = t.payloads.at({static_cast<std::uint32_t>(root.owner_group), 1}).at(t.root);
    t.payloads[{other, 1}][t.root] = payload;
    CHECK(!verify::audit_visibility(t, frags).empty());

    // a leaf label at a party without the class
    auto u = r.tree;
    u.payloads[{1, 2}]["forged"] = proto::LeafPayload{"yes"};
    CHECK(!verify::audit_visibility(u, frags).empty());
  }
}

TEST_CASE("cost expressions") {
  const cost::CostParams p{.h = 3, .v = 3, .T = 100, .R = 6, .d = 2, .m = 3, .t = 128, .n = 10};
  const auto hm = cost::predict_hmerge(p);
  CHECK(hm.computation == doctest::Approx(90596966400.0));
  CHECK(hm.communication == doctest::Approx(3456000.0));
  const auto vm = cost::predict_vmerge(p);
  CHECK(vm.computation == doctest::Approx(407686349338.1524));
  CHECK(vm.communication == doctest::Approx(25500620.199571956));

  auto h2 = p, h4 = p;
  h2.h = 2, h4.h = 4;
  CHECK(cost::predict_hmerge(h4).computation / cost::predict_hmerge(h2).computation == doctest::Approx(4));
  CHECK(cost::predict_hmerge(h4).communication / cost::predict_hmerge(h2).communication == doctest::Approx(4));
  auto r2 = p;
  r2.R = 12;
  CHECK(cost::predict_hmerge(r2).computation / hm.computation == doctest::Approx(2));
  CHECK(cost::predict_vmerge(r2, false).communication / cost::predict_vmerge(p, false).communication ==
        doctest::Approx(2));

  // only the leading term depends on v, and it is quadratic
  auto at = [&](std::uint64_t v) {
    auto q = p;
    q.v = v;
    return cost::predict_vmerge(q).computation;
  };
  CHECK((at(9) - at(3)) / (at(6) - at(3)) == doctest::Approx(8.0 / 3));

  auto unit = p;
  unit.d = unit.m = 1;
  CHECK(cost::vmerge_values_per_attribute(unit) == 4);
  auto zero = p;
  zero.T = 0;
  CHECK_THROWS_AS(cost::predict_hmerge(zero), ConfigError);
}

TEST_CASE("exponent fits") {
  const std::vector<double> x{2, 3, 4, 5}, y{12, 27, 48, 75};
  CHECK(cost::fit_exponent(x, y) == doctest::Approx(2.0));
  const std::vector<double> one{3, 3}, two{1, 2};
  CHECK_THROWS_AS(cost::fit_exponent(one, two), FitError);
  CHECK_THROWS_AS(cost::fit_exponent(std::vector<double>{1}, std::vector<double>{1}), FitError);
  const std::vector<double> neg{-1, 2};
  CHECK_THROWS_AS(cost::fit_exponent(two, neg), FitError);
}

TEST_CASE("fit_and_compare on model-generated counters") {
  std::vector<cost::Measurement> ms;
  for (std::uint64_t h : {2, 3, 4, 5}) {
    cost::CostParams p{.h = h, .v = 2, .T = 60, .R = 6};
    const auto pr = cost::predict_hmerge(p);
    ms.push_back({"grid-hmerge", p, {.messages = h * h, .bytes = std::uint64_t(pr.communication), .cipher_ops = 1, .circuit_units = 1}});
  }
  const auto rep = cost::fit_and_compare(ms);
  const auto& g = rep["groups"][0];
  CHECK(g["swept"] == "h");
  CHECK(g["exponents"]["measured"]["bytes"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g["exponents"]["measured"]["messages"].get<double>() == doctest::Approx(2.0));
  CHECK(g["exponents"]["predicted"]["computation"].get<double>() == doctest::Approx(2.0));
  CHECK(rep["verdict"]["cheaper_on_bytes"].is_null());
  CHECK(!cost::report_table(rep).empty());

  ms.pop_back();
  CHECK_THROWS_AS(cost::fit_and_compare(ms), FitError);
  ms.push_back(ms.back());
  ms.back().params.T = 61;
  ms.back().params.h = 9;
  CHECK_THROWS_AS(cost::fit_and_compare(ms), FitError);
}

TEST_CASE("cost parameters from a partition") {
  const auto rel = testutil::weather();
  const auto part = data::make_partition(rel, 2, 3, 1);
  const auto p = cost::CostParams::of(rel, part, 128, 10);
  CHECK(p == cost::CostParams{.h = 3, .v = 2, .T = 14, .R = 4, .d = 2, .m = 3, .t = 128, .n = 10});
  CHECK(cost::to_json(p)["k"] == 6);
}
