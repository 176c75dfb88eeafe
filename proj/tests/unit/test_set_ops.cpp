#include <doctest.h>

#include <algorithm>
#include <set>

#include "gridtree/errors.hpp"
#include "gridtree/smpc/set_ops.hpp"
#include "helpers.hpp"

using namespace gridtree;
using namespace gridtree::smpc;
using net::Network;
using testutil::ring;

namespace {

SetProtocolOptions options(unsigned bits = 64, std::size_t agreed = 0) {
  SetProtocolOptions o;
  o.group = CommutativeGroup::for_bits(bits);
  o.agreed_size = agreed;
  return o;
}

std::vector<u128> plain_union(const std::vector<std::vector<u128>>& sets) {
  std::set<u128> s;
  for (const auto& x : sets) s.insert(x.begin(), x.end());
  return {s.begin(), s.end()};
}

std::size_t plain_intersection(const std::vector<std::vector<u128>>& sets) {
  std::size_t n = 0;
  for (auto x : sets[0])
    if (std::all_of(sets.begin(), sets.end(), [x](const auto& s) { return std::find(s.begin(), s.end(), x) != s.end(); }))
      ++n;
  return n;
}

}  // namespace

TEST_CASE("union examples") {
  const auto ps = ring(3);
  Network net(ps, 1);
  const std::vector<std::vector<u128>> sets{{1, 2}, {2, 3}, {5}};
  CHECK(secure_union(net, ps, sets, options()) == std::vector<u128>{1, 2, 3, 5});
  const std::vector<std::vector<u128>> empty{{}, {}, {}};
  CHECK(secure_union(net, ps, empty, options(64, 4)).empty());
  CHECK(net.pending() == 0);
}

TEST_CASE("union rejects bad calls") {
  const auto ps = ring(3);
  Network net(ps, 1);
  const std::vector<std::vector<u128>> sets{{1, 2, 3}, {2}, {5}};
  CHECK_THROWS_AS(secure_union(net, ps, sets, options(64, 2)), PaddingOverflow);
  const std::vector<std::vector<u128>> two{{1}, {2}};
  CHECK_THROWS_AS(secure_union(net, std::span(ps).first(2), two, options()), TooFewParties);
  const std::vector<std::vector<u128>> dup{{1, 1}, {2}, {3}};
  CHECK_THROWS_AS(secure_union(net, ps, dup, options()), SpecError);
}

TEST_CASE("class-label variant") {
  const auto ps = ring(3);
  const auto g = CommutativeGroup::for_bits(64);
  auto run = [&](std::vector<ClassVote> votes) {
    Network net(ps, 2);
    auto o = options();
    return secure_union_class_variant(net, ps, votes, o);
  };
  const auto yes = ClassVote::of(7), no = ClassVote::of(8);
  auto all_yes = run({yes, yes, yes});
  CHECK(all_yes.uniform);
  CHECK(all_yes.value == 7);
  CHECK(!run({yes, ClassVote::bottom(), yes}).uniform);
  CHECK(!run({yes, no, yes}).uniform);
  auto abstained = run({ClassVote::abstain(), yes, ClassVote::abstain()});
  CHECK(abstained.uniform);
  CHECK(abstained.value == 7);
  CHECK(!run({ClassVote::abstain(), ClassVote::abstain(), ClassVote::abstain()}).uniform);
}

TEST_CASE("intersection size") {
  const auto ps = ring(3);
  Network net(ps, 1);
  const std::vector<std::vector<u128>> sets{{1, 2, 3}, {2, 3, 4}, {3, 2, 9}};
  CHECK(secure_intersection_size(net, ps, sets, options(64, 5), ps) == 2);
  const std::vector<std::vector<u128>> disjoint{{1}, {2}, {3}};
  CHECK(secure_intersection_size(net, ps, disjoint, options(64, 5), ps) == 0);
  auto two = options(64, 4);
  two.min_parties = 2;
  const std::vector<std::vector<u128>> pair{{1, 2}, {2, 3}};
  CHECK(secure_intersection_size(net, std::span(ps).first(2), pair, two, ps) == 1);
  CHECK_THROWS_AS(secure_intersection_size(net, ps, sets, options(64, 2), ps), PaddingOverflow);
}

TEST_CASE("random unions and intersections") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t k = 3 + rng.below(3);
    const auto ps = ring(k);
    std::vector<std::vector<u128>> sets(k);
    for (auto& s : sets) {
      std::set<u128> x;
      const auto n = rng.below(8);
      while (x.size() < n) x.insert(1 + rng.below(12));
      s.assign(x.begin(), x.end());
    }
    Network net(ps, trial);
    CHECK(secure_union(net, ps, sets, options(32, 8)) == plain_union(sets));
    CHECK(secure_intersection_size(net, ps, sets, options(32, 8), ps) == plain_intersection(sets));
  }
}

TEST_CASE("shared layer keys give the same union") {
  const auto ps = ring(4);
  Network net(ps, 1);
  auto o = options();
  Rng rng(3);
  const auto key = generate_key(o.group, rng);
  o.keys.assign(4, key);
  const std::vector<std::vector<u128>> sets{{1}, {2}, {3}, {1, 4}};
  CHECK(secure_union(net, ps, sets, o) == std::vector<u128>{1, 2, 3, 4});
}

TEST_CASE("no message carries a plain real item before the result") {
  const auto ps = ring(4);
  const auto g = CommutativeGroup::for_bits(64);
  const std::vector<std::vector<u128>> sets{{11, 12}, {13}, {11, 14}, {15, 16}};
  std::set<net::Word> plain;
  for (const auto& s : sets)
    for (auto x : s) plain.insert(g->encode(ItemTag::Real, x)), plain.insert(x);
  Network net(ps, 4);
  std::size_t seen = 0, leaks = 0;
  net.set_observer([&](const net::TranscriptEntry& e, const net::Payload& p) {
    if (e.tag.ends_with(":result") || e.tag.ends_with(":size")) return;
    ++seen;
    for (auto w : p)
      if (plain.count(w)) ++leaks;
  });
  secure_union(net, ps, sets, options(64, 4));
  secure_intersection_size(net, ps, sets, options(64, 4), ps);
  CHECK(seen > 0);
  CHECK(leaks == 0);
}
