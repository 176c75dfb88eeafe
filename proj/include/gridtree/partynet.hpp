#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gridtree/dataset.hpp"
#include "gridtree/rng.hpp"

namespace gridtree::net {

using Word = unsigned __int128;
using Payload = std::vector<Word>;

/// Party P_ij. The pseudo-party (0, 0) stands for an ideal functionality.
struct PartyId {
  std::uint32_t i = 0;
  std::uint32_t j = 0;

  static constexpr PartyId ideal() { return {0, 0}; }
  bool is_ideal() const { return i == 0 && j == 0; }
  std::string str() const;

  friend bool operator==(const PartyId&, const PartyId&) = default;
  friend auto operator<=>(const PartyId&, const PartyId&) = default;
};

std::vector<PartyId> parties_of(const data::GridPartition& part);

struct TranscriptEntry {
  std::uint64_t round = 0;
  PartyId from;
  PartyId to;
  std::uint64_t bits = 0;
  std::uint64_t bytes = 0;
  std::string tag;
};

struct PartyCounters {
  std::uint64_t cipher_ops = 0;
  std::uint64_t circuit_units = 0;
};

struct CostCounters {
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
  std::uint64_t cipher_ops = 0;
  std::uint64_t circuit_units = 0;

  CostCounters& operator+=(const CostCounters& o);
  friend bool operator==(const CostCounters&, const CostCounters&) = default;
};

nlohmann::json to_json(const CostCounters& c);

/// Append-only record of every inter-party message plus per-party
/// computation counters.
class Transcript {
 public:
  void append(TranscriptEntry e);
  void charge_cipher(PartyId p, std::uint64_t ops);
  void charge_circuit(PartyId p, std::uint64_t units);

  const std::vector<TranscriptEntry>& entries() const { return entries_; }
  const std::map<PartyId, PartyCounters>& counters() const { return counters_; }
  bool empty() const { return entries_.empty() && counters_.empty(); }

  /// Entries whose tag starts with `prefix`.
  std::vector<TranscriptEntry> with_tag_prefix(std::string_view prefix) const;
  /// Entries sent or received by `p`.
  std::vector<TranscriptEntry> involving(PartyId p) const;

  /// One JSON object per line: {round, from, to, bytes, tag}.
  std::string to_jsonl() const;

  friend bool operator==(const Transcript& a, const Transcript& b);

 private:
  std::vector<TranscriptEntry> entries_;
  std::map<PartyId, PartyCounters> counters_;
};

bool operator==(const TranscriptEntry& a, const TranscriptEntry& b);
bool operator==(const PartyCounters& a, const PartyCounters& b);

CostCounters snapshot_counters(const Transcript& t);

/// Synchronous message bus. Messages are queued per receiver; `recv` takes
/// the oldest matching one. Anything still queued when a run ends is a hang.
class Network {
 public:
  Network(std::vector<PartyId> parties, std::uint64_t seed);

  const std::vector<PartyId>& parties() const { return parties_; }
  bool has_party(PartyId p) const;

  /// Queues `payload` for `to`; the transcript records `bits` (rounded up to
  /// whole bytes, at least one).
  void send(PartyId from, PartyId to, std::string tag, Payload payload, std::uint64_t bits);
  Payload recv(PartyId to, PartyId from, std::string_view tag);

  void tick() { ++round_; }
  std::uint64_t round() const { return round_; }

  /// Per-party random stream; a party draws randomness only from its own.
  Rng& rng(PartyId p);

  Transcript& transcript() { return transcript_; }
  const Transcript& transcript() const { return transcript_; }

  std::size_t pending() const;
  /// Throws ProtocolHang when undelivered messages remain.
  void check_drained() const;

  /// Deterministic run identifier in UUID text form.
  const std::string& run_id() const { return run_id_; }

  /// Sees every message as it is sent, payload included. Meant for audits
  /// and tests; parties never get this view.
  using Observer = std::function<void(const TranscriptEntry&, const Payload&)>;
  void set_observer(Observer obs) { observer_ = std::move(obs); }

 private:
  struct Envelope {
    PartyId from;
    std::string tag;
    Payload payload;
  };
  std::vector<PartyId> parties_;
  std::map<PartyId, std::deque<Envelope>> inbox_;
  std::map<PartyId, Rng> rngs_;
  Transcript transcript_;
  std::uint64_t round_ = 0;
  std::uint64_t seed_;
  std::string run_id_;
  Observer observer_;
};

/// Runs `program(Network&)` over the parties of `topology` and returns its
/// result together with the transcript.
template <class Program>
auto run_protocol(const data::GridPartition& topology, Program&& program, std::uint64_t seed) {
  Network net(parties_of(topology), seed);
  using R = std::invoke_result_t<Program&, Network&>;
  if constexpr (std::is_void_v<R>) {
    program(net);
    net.check_drained();
    return std::pair<std::monostate, Transcript>{std::monostate{}, net.transcript()};
  } else {
    R result = program(net);
    net.check_drained();
    return std::pair<R, Transcript>{std::move(result), net.transcript()};
  }
}

}  // namespace gridtree::net
