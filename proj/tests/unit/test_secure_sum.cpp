#include <doctest.h>

#include <set>

#include "gridtree/errors.hpp"
#include "gridtree/smpc/secure_sum.hpp"
#include "helpers.hpp"

using namespace gridtree;
using namespace gridtree::smpc;
using testutil::ring;
using net::Network;

TEST_CASE("secure sum examples") {
  Network net(ring(3), 1);
  const auto ps = ring(3);
  const std::vector<std::uint64_t> a{2, 3, 5}, z{0, 0, 0}, w{7, 9, 4};
  CHECK(secure_sum(net, ps, a, SumDomain(6)) == 10);
  CHECK(secure_sum(net, ps, z, SumDomain(6)) == 0);
  CHECK(secure_sum(net, ps, w, SumDomain(4)) == 4);
}

TEST_CASE("secure sum rejects bad calls") {
  Network net(ring(3), 1);
  const auto ps = ring(3);
  const std::vector<std::uint64_t> two{1, 2}, big{1, 2, 16};
  CHECK_THROWS_AS(secure_sum(net, std::span(ps).first(2), two, SumDomain(4)), TooFewParties);
  CHECK_THROWS_AS(secure_sum(net, ps, big, SumDomain(4)), DomainViolation);
  CHECK_THROWS_AS(SumDomain(0), DomainViolation);
  CHECK_THROWS_AS(SumDomain(65), DomainViolation);
  const std::vector<std::uint64_t> ok{1, 2, 3};
  CHECK_THROWS_AS(secure_sum_masked(net, ps, ok, SumDomain(4), 16), DomainViolation);
}

TEST_CASE("sum domains") {
  CHECK(SumDomain::above(0).bits() == 1);
  CHECK(SumDomain::above(14).bits() == 4);
  CHECK(SumDomain::above(16).bits() == 5);
  CHECK(SumDomain::ring64().mask() == ~std::uint64_t{0});
  CHECK(SumDomain(3).neg(1) == 7);
}

TEST_CASE("split variant agrees with the plain sum") {
  Rng rng(9);
  for (std::size_t k = 3; k <= 6; ++k) {
    const auto ps = ring(k);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::uint64_t> in(k);
      std::uint64_t expect = 0;
      for (auto& x : in) expect += (x = rng.below(1000));
      Network net(ps, trial);
      CHECK(split_secure_sum(net, ps, in, SumDomain(16), 2) == expect);
      Network net2(ps, trial);
      CHECK(secure_sum(net2, ps, in, SumDomain(16)) == expect);
    }
  }
}

TEST_CASE("split rounds walk different rings") {
  for (std::size_t k = 3; k <= 7; ++k) {
    const auto r0 = split_ring_order(k, 0), r1 = split_ring_order(k, 1);
    CHECK(std::set<std::size_t>(r0.begin(), r0.end()).size() == k);
    CHECK(std::set<std::size_t>(r1.begin(), r1.end()).size() == k);
    CHECK(r0 != r1);
  }
}

TEST_CASE("split_value sums back") {
  Rng rng(4);
  const SumDomain d(10);
  for (int k = 0; k < 100; ++k) {
    const std::uint64_t v = rng.below(1024);
    const auto parts = split_value(v, 1 + rng.below(5), d, rng);
    std::uint64_t s = 0;
    for (auto p : parts) s = d.add(s, p);
    CHECK(s == v);
  }
  CHECK_THROWS_AS(split_value(1, 0, d, rng), DomainViolation);
}

TEST_CASE("sum left in shares") {
  Rng rng(5);
  for (std::size_t k = 3; k <= 5; ++k) {
    const auto ps = ring(k);
    Network net(ps, k);
    std::vector<std::uint64_t> in(k);
    std::uint64_t expect = 0;
    for (auto& x : in) expect += (x = rng.below(50));
    const auto s = secure_sum_shares(net, ps, in, SumDomain(8), "s");
    CHECK(s.reconstruct() == expect);
    CHECK(s.alice == ps.back());
    CHECK(s.bob == ps.front());
    // no announcement, only the k - 1 ring hops
    CHECK(net.transcript().entries().size() == k - 1);
  }
}

TEST_CASE("two parties already hold shares") {
  const auto ps = ring(2);
  Network net(ps, 1);
  const std::vector<std::uint64_t> in{5, 9};
  const auto s = sum_to_shares(net, ps, in, SumDomain(8), "s");
  CHECK(s.reconstruct() == 14);
  CHECK(net.transcript().entries().empty());
}
