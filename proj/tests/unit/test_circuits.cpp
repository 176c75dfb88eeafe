#include <doctest.h>

#include <set>

#include "gridtree/errors.hpp"
#include "gridtree/smpc/circuits.hpp"
#include "helpers.hpp"

using namespace gridtree;
using namespace gridtree::smpc;
using net::Network;
using testutil::ring;

namespace {

SumShares shares_of(std::uint64_t x, PartyId a, PartyId b, Rng& rng, SumDomain d = SumDomain(8)) {
  const std::uint64_t r = rng.next() & d.mask();
  return {a, d.add(x, r), b, d.neg(r), d};
}

std::set<PartyId> out_recipients(const net::Transcript& t, const std::string& tag) {
  std::set<PartyId> out;
  for (const auto& e : t.with_tag_prefix(tag + ":out")) out.insert(e.to);
  return out;
}

}  // namespace

TEST_CASE("is_zero") {
  const auto ps = ring(3);
  Network net(ps, 1);
  Rng rng(1);
  CHECK(circuit_is_zero(net, shares_of(0, ps[0], ps[1], rng), {ps[2]}, {}, "z"));
  CHECK(!circuit_is_zero(net, shares_of(3, ps[0], ps[1], rng), {ps[2]}, {}, "z"));
  CHECK(out_recipients(net.transcript(), "z") == std::set<PartyId>{ps[2]});
}

TEST_CASE("all zero except one agrees with the plain rule") {
  const auto ps = ring(2);
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> vals(1 + rng.below(4));
    for (auto& v : vals) v = rng.below(3) == 0 ? rng.below(5) : 0;
    std::vector<SumShares> sh;
    for (auto v : vals) sh.push_back(shares_of(v, ps[0], ps[1], rng));
    Network net(ps, trial);
    const auto got = circuit_all_zero_except_one(net, sh, ps, {}, "one");
    const auto want = plain_all_zero_except_one(vals);
    CHECK(got.holds == want.holds);
    CHECK(got.index == want.index);
  }
}

TEST_CASE("plain argmax ties go to the first") {
  CHECK(plain_argmax({3, 5, 5, 1}) == 1);
  CHECK(plain_argmax({-2, -2}) == 0);
}

TEST_CASE("class summary") {
  const auto ps = ring(3);
  Rng rng(3);
  auto run = [&](std::vector<std::uint64_t> counts) {
    Network net(ps, 1);
    std::vector<SumShares> sh;
    for (auto c : counts) sh.push_back(shares_of(c, ps[0], ps[1], rng));
    auto r = circuit_class_summary(net, sh, ps, {ps[2]}, {}, "cls");
    CHECK(out_recipients(net.transcript(), "cls") == std::set<PartyId>(ps.begin(), ps.end()));
    return r;
  };
  CHECK(run({0, 0}).verdict == ClassSummary::Verdict::Empty);
  const auto u = run({0, 4});
  CHECK(u.verdict == ClassSummary::Verdict::Uniform);
  CHECK(u.majority == 1);
  const auto m = run({3, 3, 1});
  CHECK(m.verdict == ClassSummary::Verdict::Mixed);
  CHECK(m.majority == 0);
}

TEST_CASE("argmax over shared scores") {
  const auto ps = ring(4);
  Rng rng(5);
  auto cand = [&](std::uint64_t rank, std::int64_t score) {
    const std::uint64_t r = rng.next();
    return ScoreInput{rank, {static_cast<std::uint64_t>(score) + r}, {0 - r}, {}, {}};
  };
  std::vector<ScoreHolder> holders{{ps[0], ps[1], {cand(0, 5), cand(2, 9)}},
                                   {ps[2], ps[3], {cand(1, 9), cand(3, -4)}}};
  Network net(ps, 1);
  const auto r = circuit_argmax_score(net, holders, ps, {{ps[0], ps[1]}, {ps[2], ps[3]}}, {}, "am");
  CHECK(r.holder == 1);
  CHECK(r.candidate == 0);
  CHECK(r.rank == 1);
  // the candidate index reaches only the owners of each holder
  std::set<PartyId> got;
  for (const auto& e : net.transcript().with_tag_prefix("am:out")) got.insert(e.to);
  CHECK(got == std::set<PartyId>(ps.begin(), ps.end()));
  CHECK(net.transcript().with_tag_prefix("am:out").size() == ps.size() + 4);
}

TEST_CASE("argmax over plain gains") {
  const auto ps = ring(2);
  Network net(ps, 1);
  std::vector<GainHolder> holders{{ps[0], {{0, 0.5}, {3, 0.7}}}, {ps[1], {{1, 0.7}, {2, 0.1}}}};
  const auto r = circuit_argmax_gain(net, holders, ps, {{ps[0]}, {ps[1]}}, {}, "g");
  CHECK(r.holder == 1);
  CHECK(r.rank == 1);
}

TEST_CASE("spec errors") {
  const auto ps = ring(2);
  Network net(ps, 1);
  IdealCircuitSpec spec;
  spec.name = "bad";
  spec.inputs = {{ps[0], 2}};
  spec.outputs = {{{ps[1]}}};
  spec.fn = [](const std::vector<Words>& in) { return std::vector<Words>{in[0]}; };
  CHECK_THROWS_AS(ideal_circuit_eval(net, spec, {{1}}), SpecError);
  CHECK_THROWS_AS(ideal_circuit_eval(net, spec, {}), SpecError);
  CHECK(ideal_circuit_eval(net, spec, {{1, 2}}) == std::vector<Words>{{1, 2}});
  CHECK(out_recipients(net.transcript(), "bad") == std::set<PartyId>{ps[1]});
  CHECK_THROWS_AS(circuit_argmax_score(net, {}, ps, {}, {}, "e"), SpecError);
  CHECK_THROWS_AS(circuit_argmax_score(net, {{ps[0], ps[1], {}}}, ps, {}, {}, "e"), SpecError);
}

TEST_CASE("input billing follows the declared widths") {
  const auto ps = ring(2);
  Network net(ps, 1);
  IdealCircuitSpec spec;
  spec.name = "w";
  spec.inputs = {{ps[0], 3}};
  spec.outputs = {{{ps[1]}}};
  spec.value_bits = 6;
  spec.key_bits = 128;
  spec.factor = 10;
  spec.fn = [](const std::vector<Words>&) { return std::vector<Words>{{0}}; };
  ideal_circuit_eval(net, spec, {{1, 2, 3}});
  CHECK(net.transcript().with_tag_prefix("w:in")[0].bits == 3u * 6 * 128 * 10);
  CHECK(net.transcript().counters().at(ps[0]).circuit_units == 18);
}
