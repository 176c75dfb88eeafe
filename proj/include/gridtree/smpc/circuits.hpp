#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gridtree/partynet.hpp"
#include "gridtree/smpc/secure_sum.hpp"

namespace gridtree::smpc {

using Words = std::vector<std::uint64_t>;

/// A function evaluated by a trusted coordinator standing in for a garbled
/// circuit. Each input party sends its words to the coordinator; each output
/// goes only to its listed recipients.
///
/// Charging: every input bit costs one unit of circuit work at its sender
/// and the input message is billed factor * bits * key_bits wire bits.
/// Outputs are billed at their plain width.
struct IdealCircuitSpec {
  struct Input {
    PartyId party;
    std::size_t words = 0;
  };
  struct Output {
    std::vector<PartyId> recipients;
  };

  std::string name;
  std::vector<Input> inputs;
  std::vector<Output> outputs;
  unsigned value_bits = 64;  // charged width of one input word
  unsigned key_bits = 128;
  unsigned factor = 1;
  std::function<std::vector<Words>(const std::vector<Words>&)> fn;
};

/// Evaluates `spec` on one word vector per declared input. Returns the
/// outputs in declaration order. Throws SpecError on arity mismatch.
std::vector<Words> ideal_circuit_eval(net::Network& net, const IdealCircuitSpec& spec,
                                      const std::vector<Words>& inputs);

/// Pluggable evaluator; the default is ideal_circuit_eval.
using CircuitBackend =
    std::function<std::vector<Words>(net::Network&, const IdealCircuitSpec&, const std::vector<Words>&)>;
CircuitBackend& circuit_backend();

struct CircuitCost {
  unsigned key_bits = 128;
  unsigned value_bits = 64;
};

/// True iff the shared value is zero. The verdict is announced to `recipients`.
bool circuit_is_zero(net::Network& net, const SumShares& s, const std::vector<PartyId>& recipients,
                     CircuitCost cost, const std::string& tag);

/// Index of the largest value; ties go to the lowest index.
std::size_t plain_argmax(const std::vector<std::int64_t>& values);

/// All but exactly one of the shared values are zero. On success `index`
/// names the non-zero one.
struct ExactlyOne {
  bool holds = false;
  std::size_t index = 0;
};
ExactlyOne plain_all_zero_except_one(const std::vector<std::uint64_t>& values);
ExactlyOne circuit_all_zero_except_one(net::Network& net, const std::vector<SumShares>& values,
                                       const std::vector<PartyId>& recipients, CircuitCost cost,
                                       const std::string& tag);

/// Class summary over per-class counts given as additive shares: the
/// public verdict and, privately to `class_holders`, the majority (ties to
/// the lowest index), which is also the class of a uniform node.
struct ClassSummary {
  enum class Verdict { Empty, Uniform, Mixed };
  Verdict verdict = Verdict::Empty;
  std::size_t majority = 0;
};
ClassSummary circuit_class_summary(net::Network& net, const std::vector<SumShares>& counts,
                                   const std::vector<PartyId>& public_recipients,
                                   const std::vector<PartyId>& class_holders, CircuitCost cost,
                                   const std::string& tag);

/// Candidate attribute as seen by the argmax circuit: a public tie rank and
/// the score terms as additive shares held by two parties.
///   score = sum(pos) - sum(neg)  (signed fixed point in Z_2^64)
struct ScoreInput {
  std::uint64_t rank = 0;
  std::vector<std::uint64_t> pos_a, pos_b;
  std::vector<std::uint64_t> neg_a, neg_b;
};

struct ScoreHolder {
  PartyId alice;
  PartyId bob;
  std::vector<ScoreInput> candidates;
};

struct ArgmaxResult {
  std::size_t holder = 0;     // index into the holders
  std::size_t candidate = 0;  // index into that holder's candidates
  std::uint64_t rank = 0;
};

/// Picks the candidate with the largest score over all holders; exact ties
/// go to the smaller rank. The winning holder index is announced to
/// `public_recipients`; the candidate index goes only to the winner's
/// `owners` (looked up per holder).
ArgmaxResult circuit_argmax_score(net::Network& net, const std::vector<ScoreHolder>& holders,
                                  const std::vector<PartyId>& public_recipients,
                                  const std::vector<std::vector<PartyId>>& owners,
                                  CircuitCost cost, const std::string& tag);

/// Plaintext gains (one holder per input party, each with (rank, gain)).
/// Gains within the tie epsilon count as equal and go to the smaller rank.
struct GainHolder {
  PartyId party;
  std::vector<std::pair<std::uint64_t, double>> candidates;
};
ArgmaxResult circuit_argmax_gain(net::Network& net, const std::vector<GainHolder>& holders,
                                 const std::vector<PartyId>& public_recipients,
                                 const std::vector<std::vector<PartyId>>& owners,
                                 CircuitCost cost, const std::string& tag);

}  // namespace gridtree::smpc
