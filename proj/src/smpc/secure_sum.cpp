#include "gridtree/smpc/secure_sum.hpp"

#include <bit>
#include <numeric>

#include "gridtree/errors.hpp"

namespace gridtree::smpc {

SumDomain::SumDomain(unsigned bits) : bits_(bits) {
  if (bits < 1 || bits > 64) throw DomainViolation("sum modulus must be 2^1..2^64");
}

SumDomain SumDomain::above(std::uint64_t bound) {
  const unsigned bits = static_cast<unsigned>(std::bit_width(bound));
  return SumDomain(bits == 0 ? 1 : bits);
}

namespace {

void check_inputs(std::span<const PartyId> parties, std::span<const std::uint64_t> inputs,
                  SumDomain domain, std::size_t min_parties) {
  if (parties.size() < min_parties)
    throw TooFewParties("secure sum needs at least " + std::to_string(min_parties) +
                        " parties, got " + std::to_string(parties.size()));
  if (inputs.size() != parties.size()) throw SpecError("one input per party is required");
  for (auto x : inputs)
    if (!domain.contains(x))
      throw DomainViolation("input " + std::to_string(x) + " is outside Z_2^" +
                            std::to_string(domain.bits()));
}

// Passes the running masked total from parties[0] to the last party.
// Returns the value the last party ends up with.
std::uint64_t ring_pass(net::Network& net, std::span<const PartyId> parties,
                        std::span<const std::uint64_t> inputs, SumDomain domain,
                        std::uint64_t mask, const std::string& tag) {
  const unsigned w = domain.bits();
  std::uint64_t running = domain.add(inputs[0], mask);
  net.transcript().charge_circuit(parties[0], w);
  for (std::size_t a = 1; a < parties.size(); ++a) {
    net.send(parties[a - 1], parties[a], tag + ":ring", {running}, w);
    net.tick();
    running = static_cast<std::uint64_t>(net.recv(parties[a], parties[a - 1], tag + ":ring")[0]);
    running = domain.add(running, inputs[a]);
    net.transcript().charge_circuit(parties[a], w);
  }
  return running;
}

}  // namespace

std::uint64_t secure_sum(net::Network& net, std::span<const PartyId> parties,
                         std::span<const std::uint64_t> inputs, SumDomain domain,
                         const std::string& tag) {
  check_inputs(parties, inputs, domain, 3);
  return secure_sum_masked(net, parties, inputs, domain, net.rng(parties[0]).next() & domain.mask(), tag);
}

std::uint64_t secure_sum_masked(net::Network& net, std::span<const PartyId> parties,
                                std::span<const std::uint64_t> inputs, SumDomain domain, std::uint64_t r,
                                const std::string& tag) {
  check_inputs(parties, inputs, domain, 3);
  if (!domain.contains(r)) throw DomainViolation("mask is outside the sum domain");
  const unsigned w = domain.bits();
  const std::uint64_t last = ring_pass(net, parties, inputs, domain, r, tag);
  net.send(parties.back(), parties[0], tag + ":ring", {last}, w);
  net.tick();
  const auto back = static_cast<std::uint64_t>(net.recv(parties[0], parties.back(), tag + ":ring")[0]);
  const std::uint64_t sum = domain.sub(back, r);
  net.transcript().charge_circuit(parties[0], w);
  for (std::size_t a = 1; a < parties.size(); ++a) net.send(parties[0], parties[a], tag + ":announce", {sum}, w);
  net.tick();
  for (std::size_t a = 1; a < parties.size(); ++a) net.recv(parties[a], parties[0], tag + ":announce");
  return sum;
}

SumShares secure_sum_shares(net::Network& net, std::span<const PartyId> parties,
                            std::span<const std::uint64_t> inputs, SumDomain domain,
                            const std::string& tag) {
  check_inputs(parties, inputs, domain, 3);
  const std::uint64_t r = net.rng(parties[0]).next() & domain.mask();
  SumShares s;
  s.domain = domain;
  s.alice = parties.back();
  s.masked = ring_pass(net, parties, inputs, domain, r, tag);
  s.bob = parties[0];
  s.neg_mask = domain.neg(r);
  return s;
}

SumShares sum_to_shares(net::Network& net, std::span<const PartyId> parties,
                        std::span<const std::uint64_t> inputs, SumDomain domain,
                        const std::string& tag) {
  if (parties.size() != 2) return secure_sum_shares(net, parties, inputs, domain, tag);
  check_inputs(parties, inputs, domain, 2);
  SumShares s;
  s.domain = domain;
  s.alice = parties[1];
  s.masked = inputs[1];
  s.bob = parties[0];
  s.neg_mask = inputs[0];
  return s;
}

std::vector<std::uint64_t> split_value(std::uint64_t value, std::size_t parts, SumDomain domain,
                                       Rng& rng) {
  if (parts == 0) throw DomainViolation("cannot split into zero parts");
  if (!domain.contains(value)) throw DomainViolation("value is outside the sum domain");
  std::vector<std::uint64_t> out(parts);
  std::uint64_t rest = value;
  for (std::size_t i = 0; i + 1 < parts; ++i) {
    out[i] = rng.next() & domain.mask();
    rest = domain.sub(rest, out[i]);
  }
  out.back() = rest;
  return out;
}

std::vector<std::size_t> split_ring_order(std::size_t k, std::size_t round) {
  std::vector<std::size_t> strides;
  for (std::size_t s = 1; s < k; ++s)
    if (std::gcd(s, k) == 1) strides.push_back(s);
  const std::size_t stride = strides[round % strides.size()];
  const std::size_t start = round % k;
  std::vector<std::size_t> order(k);
  for (std::size_t a = 0; a < k; ++a) order[a] = (start + a * stride) % k;
  return order;
}

std::uint64_t split_secure_sum(net::Network& net, std::span<const PartyId> parties,
                               std::span<const std::uint64_t> inputs, SumDomain domain,
                               std::size_t n_splits, const std::string& tag) {
  check_inputs(parties, inputs, domain, 3);
  if (n_splits < 2) throw DomainViolation("the split variant needs at least two parts");
  const std::size_t k = parties.size();
  std::vector<std::vector<std::uint64_t>> parts(k);
  for (std::size_t a = 0; a < k; ++a) parts[a] = split_value(inputs[a], n_splits, domain, net.rng(parties[a]));

  std::uint64_t total = 0;
  for (std::size_t r = 0; r < n_splits; ++r) {
    const auto order = split_ring_order(k, r);
    std::vector<PartyId> ring;
    std::vector<std::uint64_t> vals;
    for (auto a : order) {
      ring.push_back(parties[a]);
      vals.push_back(parts[a][r]);
    }
    total = domain.add(total, secure_sum(net, ring, vals, domain, tag + ":" + std::to_string(r)));
  }
  return total;
}

}  // namespace gridtree::smpc
