#include "gridtree/partynet.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "gridtree/errors.hpp"

namespace gridtree::net {

std::string PartyId::str() const {
  if (is_ideal()) return "ideal";
  return "P" + std::to_string(i) + "_" + std::to_string(j);
}

std::vector<PartyId> parties_of(const data::GridPartition& part) {
  std::vector<PartyId> out;
  for (std::size_t i = 1; i <= part.v; ++i)
    for (std::size_t j = 1; j <= part.h; ++j)
      out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
  return out;
}

CostCounters& CostCounters::operator+=(const CostCounters& o) {
  messages += o.messages;
  bytes += o.bytes;
  cipher_ops += o.cipher_ops;
  circuit_units += o.circuit_units;
  return *this;
}

nlohmann::json to_json(const CostCounters& c) {
  return {{"messages", c.messages},
          {"bytes", c.bytes},
          {"cipher_ops", c.cipher_ops},
          {"circuit_units", c.circuit_units}};
}

bool operator==(const TranscriptEntry& a, const TranscriptEntry& b) {
  return a.round == b.round && a.from == b.from && a.to == b.to && a.bits == b.bits &&
         a.bytes == b.bytes && a.tag == b.tag;
}

bool operator==(const PartyCounters& a, const PartyCounters& b) {
  return a.cipher_ops == b.cipher_ops && a.circuit_units == b.circuit_units;
}

bool operator==(const Transcript& a, const Transcript& b) {
  return a.entries_ == b.entries_ && a.counters_ == b.counters_;
}

void Transcript::append(TranscriptEntry e) {
  if (e.bytes == 0) throw std::logic_error("transcript entries must have a positive size");
  if (!entries_.empty() && e.round < entries_.back().round)
    throw std::logic_error("transcript rounds must be non-decreasing");
  entries_.push_back(std::move(e));
}

void Transcript::charge_cipher(PartyId p, std::uint64_t ops) { counters_[p].cipher_ops += ops; }

void Transcript::charge_circuit(PartyId p, std::uint64_t units) {
  counters_[p].circuit_units += units;
}

std::vector<TranscriptEntry> Transcript::with_tag_prefix(std::string_view prefix) const {
  std::vector<TranscriptEntry> out;
  for (const auto& e : entries_)
    if (std::string_view(e.tag).substr(0, prefix.size()) == prefix) out.push_back(e);
  return out;
}

std::vector<TranscriptEntry> Transcript::involving(PartyId p) const {
  std::vector<TranscriptEntry> out;
  for (const auto& e : entries_)
    if (e.from == p || e.to == p) out.push_back(e);
  return out;
}

std::string Transcript::to_jsonl() const {
  std::string out;
  for (const auto& e : entries_) {
    nlohmann::json j{{"round", e.round},
                     {"from", e.from.str()},
                     {"to", e.to.str()},
                     {"bytes", e.bytes},
                     {"tag", e.tag}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

CostCounters snapshot_counters(const Transcript& t) {
  CostCounters c;
  for (const auto& e : t.entries()) {
    ++c.messages;
    c.bytes += e.bytes;
  }
  for (const auto& [p, pc] : t.counters()) {
    c.cipher_ops += pc.cipher_ops;
    c.circuit_units += pc.circuit_units;
  }
  return c;
}

Network::Network(std::vector<PartyId> parties, std::uint64_t seed)
    : parties_(std::move(parties)), seed_(seed) {
  for (auto p : parties_) rngs_.emplace(p, Rng{seed, p.i, p.j, 0x9a27});
  rngs_.emplace(PartyId::ideal(), Rng{seed, 0, 0, 0x9a27});
  Rng idgen{seed, 0x5eed};
  const std::uint64_t a = idgen.next(), b = idgen.next();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%08x-%04x-4%03x-%04x-%012llx",
                static_cast<unsigned>(a >> 32), static_cast<unsigned>((a >> 16) & 0xffff),
                static_cast<unsigned>(a & 0xfff),
                static_cast<unsigned>(0x8000 | ((b >> 48) & 0x3fff)),
                static_cast<unsigned long long>(b & 0xffffffffffffULL));
  run_id_ = buf;
}

bool Network::has_party(PartyId p) const {
  return p.is_ideal() || std::find(parties_.begin(), parties_.end(), p) != parties_.end();
}

void Network::send(PartyId from, PartyId to, std::string tag, Payload payload,
                   std::uint64_t bits) {
  if (!has_party(from) || !has_party(to))
    throw std::logic_error("send between unregistered parties " + from.str() + " -> " + to.str());
  if (from == to) throw std::logic_error("a party cannot message itself");
  TranscriptEntry e;
  e.round = round_;
  e.from = from;
  e.to = to;
  e.bits = bits;
  e.bytes = std::max<std::uint64_t>(1, (bits + 7) / 8);
  e.tag = tag;
  if (observer_) observer_(e, payload);
  transcript_.append(std::move(e));
  inbox_[to].push_back({from, std::move(tag), std::move(payload)});
}

Payload Network::recv(PartyId to, PartyId from, std::string_view tag) {
  auto& box = inbox_[to];
  for (auto it = box.begin(); it != box.end(); ++it) {
    if (it->from == from && it->tag == tag) {
      Payload p = std::move(it->payload);
      box.erase(it);
      return p;
    }
  }
  throw ProtocolHang(to.str() + " waits for '" + std::string(tag) + "' from " + from.str() +
                     " but nothing was sent");
}

Rng& Network::rng(PartyId p) {
  auto it = rngs_.find(p);
  if (it == rngs_.end()) throw std::logic_error("no random stream for " + p.str());
  return it->second;
}

std::size_t Network::pending() const {
  std::size_t n = 0;
  for (const auto& [p, box] : inbox_) n += box.size();
  return n;
}

void Network::check_drained() const {
  for (const auto& [p, box] : inbox_) {
    if (!box.empty())
      throw ProtocolHang(std::to_string(box.size()) + " undelivered message(s) for " + p.str() +
                         ", first tagged '" + box.front().tag + "'");
  }
}

}  // namespace gridtree::net
