#include "gridtree/smpc/circuits.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "gridtree/errors.hpp"
#include "gridtree/id3.hpp"

namespace gridtree::smpc {

std::vector<Words> ideal_circuit_eval(net::Network& net, const IdealCircuitSpec& spec,
                                      const std::vector<Words>& inputs) {
  if (inputs.size() != spec.inputs.size())
    throw SpecError("circuit '" + spec.name + "' expects " + std::to_string(spec.inputs.size()) +
                    " inputs, got " + std::to_string(inputs.size()));
  for (std::size_t k = 0; k < inputs.size(); ++k)
    if (inputs[k].size() != spec.inputs[k].words)
      throw SpecError("circuit '" + spec.name + "' input " + std::to_string(k) + " has " +
                      std::to_string(inputs[k].size()) + " words, declared " +
                      std::to_string(spec.inputs[k].words));
  const PartyId ideal = PartyId::ideal();
  const std::string in_tag = spec.name + ":in";
  const std::string out_tag = spec.name + ":out";

  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto& in = spec.inputs[k];
    if (in.words == 0) continue;
    const std::uint64_t bits = static_cast<std::uint64_t>(in.words) * spec.value_bits;
    net.transcript().charge_circuit(in.party, bits);
    net.send(in.party, ideal, in_tag, net::Payload(inputs[k].begin(), inputs[k].end()),
             bits * spec.factor * spec.key_bits);
  }
  net.tick();
  for (std::size_t k = 0; k < inputs.size(); ++k)
    if (spec.inputs[k].words > 0) net.recv(ideal, spec.inputs[k].party, in_tag);

  auto outputs = spec.fn(inputs);
  if (outputs.size() != spec.outputs.size())
    throw SpecError("circuit '" + spec.name + "' produced the wrong number of outputs");
  for (std::size_t o = 0; o < outputs.size(); ++o)
    for (auto r : spec.outputs[o].recipients)
      net.send(ideal, r, out_tag, net::Payload(outputs[o].begin(), outputs[o].end()),
               std::max<std::uint64_t>(1, outputs[o].size()) * spec.value_bits);
  net.tick();
  for (std::size_t o = 0; o < outputs.size(); ++o)
    for (auto r : spec.outputs[o].recipients) net.recv(r, ideal, out_tag);
  return outputs;
}

CircuitBackend& circuit_backend() {
  static CircuitBackend backend = ideal_circuit_eval;
  return backend;
}

namespace {

// Groups word contributions by party so that each party sends one input
// message per circuit.
class InputLayout {
 public:
  std::size_t add(PartyId p, std::uint64_t w) {
    auto it = std::find(parties_.begin(), parties_.end(), p);
    std::size_t idx = static_cast<std::size_t>(it - parties_.begin());
    if (it == parties_.end()) {
      parties_.push_back(p);
      words_.emplace_back();
    }
    slots_.push_back({idx, words_[idx].size()});
    words_[idx].push_back(w);
    return slots_.size() - 1;
  }
  std::size_t add(const SumShares& s) {
    if (s.alice == s.bob) return add(s.alice, s.reconstruct());
    const std::size_t slot = add(s.alice, s.masked);
    add(s.bob, s.neg_mask);
    return slot;
  }

  void fill(IdealCircuitSpec& spec) const {
    for (std::size_t k = 0; k < parties_.size(); ++k) spec.inputs.push_back({parties_[k], words_[k].size()});
  }
  const std::vector<Words>& words() const { return words_; }

  struct Slot {
    std::size_t input, offset;
  };
  const std::vector<Slot>& slots() const { return slots_; }

 private:
  std::vector<PartyId> parties_;
  std::vector<Words> words_;
  std::vector<Slot> slots_;
};

std::uint64_t at(const std::vector<Words>& in, const InputLayout::Slot& s) {
  return in.at(s.input).at(s.offset);
}

// Value of a SumShares added at slot `first` (its second share, if any, is
// at first + 1).
std::uint64_t shared_value(const std::vector<Words>& in, const std::vector<InputLayout::Slot>& slots,
                           std::size_t first, bool two, SumDomain dom) {
  std::uint64_t v = at(in, slots[first]);
  if (two) v = dom.add(v, at(in, slots[first + 1]));
  return v & dom.mask();
}

constexpr std::uint64_t kNone = ~std::uint64_t{0};

}  // namespace

bool circuit_is_zero(net::Network& net, const SumShares& s, const std::vector<PartyId>& recipients,
                     CircuitCost cost, const std::string& tag) {
  InputLayout lay;
  const std::size_t slot = lay.add(s);
  const bool two = !(s.alice == s.bob);
  IdealCircuitSpec spec;
  spec.name = tag;
  lay.fill(spec);
  spec.outputs = {{recipients}};
  spec.value_bits = cost.value_bits;
  spec.key_bits = cost.key_bits;
  const auto slots = lay.slots();
  const SumDomain dom = s.domain;
  spec.fn = [slots, slot, two, dom](const std::vector<Words>& in) {
    return std::vector<Words>{{shared_value(in, slots, slot, two, dom) == 0 ? 1u : 0u}};
  };
  return circuit_backend()(net, spec, lay.words())[0][0] == 1;
}

std::size_t plain_argmax(const std::vector<std::int64_t>& values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] > values[best]) best = k;
  return best;
}

ExactlyOne plain_all_zero_except_one(const std::vector<std::uint64_t>& values) {
  ExactlyOne r;
  std::size_t nonzero = 0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] != 0) {
      ++nonzero;
      r.index = k;
    }
  }
  r.holds = nonzero == 1;
  if (!r.holds) r.index = 0;
  return r;
}

namespace {

struct SharedVector {
  InputLayout lay;
  std::vector<std::pair<std::size_t, bool>> at;  // slot, two shares
  SumDomain dom{64};

  explicit SharedVector(const std::vector<SumShares>& values) {
    if (!values.empty()) dom = values.front().domain;
    for (const auto& s : values) at.push_back({lay.add(s), !(s.alice == s.bob)});
  }
};

std::vector<std::uint64_t> open_all(const std::vector<Words>& in,
                                    const std::vector<InputLayout::Slot>& slots,
                                    const std::vector<std::pair<std::size_t, bool>>& where,
                                    SumDomain dom) {
  std::vector<std::uint64_t> out;
  for (auto [slot, two] : where) out.push_back(shared_value(in, slots, slot, two, dom));
  return out;
}

}  // namespace

ExactlyOne circuit_all_zero_except_one(net::Network& net, const std::vector<SumShares>& values,
                                       const std::vector<PartyId>& recipients, CircuitCost cost,
                                       const std::string& tag) {
  SharedVector sv(values);
  IdealCircuitSpec spec;
  spec.name = tag;
  sv.lay.fill(spec);
  spec.outputs = {{recipients}};
  spec.value_bits = cost.value_bits;
  spec.key_bits = cost.key_bits;
  spec.fn = [slots = sv.lay.slots(), where = sv.at, dom = sv.dom](const std::vector<Words>& in) {
    const auto r = plain_all_zero_except_one(open_all(in, slots, where, dom));
    return std::vector<Words>{{r.holds ? 1u : 0u, r.index}};
  };
  const auto out = circuit_backend()(net, spec, sv.lay.words());
  return {out[0][0] == 1, static_cast<std::size_t>(out[0][1])};
}

ClassSummary circuit_class_summary(net::Network& net, const std::vector<SumShares>& counts,
                                   const std::vector<PartyId>& public_recipients,
                                   const std::vector<PartyId>& class_holders, CircuitCost cost,
                                   const std::string& tag) {
  SharedVector sv(counts);
  IdealCircuitSpec spec;
  spec.name = tag;
  sv.lay.fill(spec);
  spec.outputs = {{public_recipients}, {class_holders}};
  spec.value_bits = cost.value_bits;
  spec.key_bits = cost.key_bits;
  spec.fn = [slots = sv.lay.slots(), where = sv.at, dom = sv.dom](const std::vector<Words>& in) {
    const auto c = open_all(in, slots, where, dom);
    id3::ClassHistogram h{std::vector<std::uint64_t>(c.begin(), c.end())};
    std::uint64_t verdict = 0;
    if (h.total() > 0) verdict = h.distinct() == 1 ? 1 : 2;
    return std::vector<Words>{{verdict}, {h.majority()}};
  };
  const auto out = circuit_backend()(net, spec, sv.lay.words());
  ClassSummary r;
  r.verdict = static_cast<ClassSummary::Verdict>(out[0][0]);
  r.majority = static_cast<std::size_t>(out[1][0]);
  return r;
}

namespace {

std::vector<IdealCircuitSpec::Output> winner_outputs(const std::vector<PartyId>& public_recipients,
                                                     const std::vector<std::vector<PartyId>>& owners) {
  std::vector<IdealCircuitSpec::Output> outs{{public_recipients}};
  for (const auto& o : owners) outs.push_back({o});
  return outs;
}

std::vector<Words> winner_words(std::size_t n_holders, std::size_t holder, std::size_t cand) {
  std::vector<Words> out{{holder}};
  for (std::size_t h = 0; h < n_holders; ++h) out.push_back({h == holder ? cand : kNone});
  return out;
}

}  // namespace

ArgmaxResult circuit_argmax_score(net::Network& net, const std::vector<ScoreHolder>& holders,
                                  const std::vector<PartyId>& public_recipients,
                                  const std::vector<std::vector<PartyId>>& owners,
                                  CircuitCost cost, const std::string& tag) {
  if (owners.size() != holders.size()) throw SpecError("one owner list per holder is required");
  InputLayout lay;
  struct Cand {
    std::size_t holder, index;
    std::uint64_t rank;
    std::vector<std::size_t> pa, pb, na, nb;
  };
  std::vector<Cand> cands;
  std::size_t n_ranked = 0;
  for (std::size_t h = 0; h < holders.size(); ++h) {
    const auto& H = holders[h];
    for (std::size_t c = 0; c < H.candidates.size(); ++c) {
      const auto& s = H.candidates[c];
      if (s.pos_a.size() != s.pos_b.size() || s.neg_a.size() != s.neg_b.size())
        throw SpecError("score shares must come in pairs");
      Cand cd{h, c, s.rank, {}, {}, {}, {}};
      for (auto w : s.pos_a) cd.pa.push_back(lay.add(H.alice, w));
      for (auto w : s.pos_b) cd.pb.push_back(lay.add(H.bob, w));
      for (auto w : s.neg_a) cd.na.push_back(lay.add(H.alice, w));
      for (auto w : s.neg_b) cd.nb.push_back(lay.add(H.bob, w));
      cands.push_back(std::move(cd));
      ++n_ranked;
    }
  }
  if (n_ranked == 0) throw SpecError("argmax over an empty candidate set");
  IdealCircuitSpec spec;
  spec.name = tag;
  lay.fill(spec);
  spec.outputs = winner_outputs(public_recipients, owners);
  spec.value_bits = cost.value_bits;
  spec.key_bits = cost.key_bits;
  const std::size_t n_holders = holders.size();
  spec.fn = [slots = lay.slots(), cands, n_holders](const std::vector<Words>& in) {
    auto sum = [&](const std::vector<std::size_t>& idx) {
      std::uint64_t s = 0;
      for (auto k : idx) s += at(in, slots[k]);
      return s;
    };
    std::size_t best = 0;
    std::int64_t best_score = std::numeric_limits<std::int64_t>::min();
    std::uint64_t best_rank = 0;
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const auto& c = cands[k];
      const auto score = static_cast<std::int64_t>(sum(c.pa) + sum(c.pb) - sum(c.na) - sum(c.nb));
      if (k == 0 || score > best_score || (score == best_score && c.rank < best_rank)) {
        best = k;
        best_score = score;
        best_rank = c.rank;
      }
    }
    return winner_words(n_holders, cands[best].holder, cands[best].index);
  };
  const auto out = circuit_backend()(net, spec, lay.words());
  ArgmaxResult r;
  r.holder = static_cast<std::size_t>(out[0][0]);
  r.candidate = static_cast<std::size_t>(out[1 + r.holder][0]);
  r.rank = holders[r.holder].candidates[r.candidate].rank;
  return r;
}

ArgmaxResult circuit_argmax_gain(net::Network& net, const std::vector<GainHolder>& holders,
                                 const std::vector<PartyId>& public_recipients,
                                 const std::vector<std::vector<PartyId>>& owners,
                                 CircuitCost cost, const std::string& tag) {
  if (owners.size() != holders.size()) throw SpecError("one owner list per holder is required");
  IdealCircuitSpec spec;
  spec.name = tag;
  std::vector<Words> inputs;
  std::size_t total = 0;
  for (const auto& H : holders) {
    Words w;
    for (auto [rank, gain] : H.candidates) {
      w.push_back(rank);
      w.push_back(std::bit_cast<std::uint64_t>(gain));
    }
    total += H.candidates.size();
    spec.inputs.push_back({H.party, w.size()});
    inputs.push_back(std::move(w));
  }
  if (total == 0) throw SpecError("argmax over an empty candidate set");
  spec.outputs = winner_outputs(public_recipients, owners);
  spec.value_bits = cost.value_bits;
  spec.key_bits = cost.key_bits;
  const std::size_t n_holders = holders.size();
  spec.fn = [n_holders](const std::vector<Words>& in) {
    struct C {
      std::uint64_t rank;
      double gain;
      std::size_t holder, index;
    };
    std::vector<C> all;
    for (std::size_t h = 0; h < in.size(); ++h)
      for (std::size_t k = 0; k + 1 < in[h].size(); k += 2)
        all.push_back({in[h][k], std::bit_cast<double>(in[h][k + 1]), h, k / 2});
    std::sort(all.begin(), all.end(), [](const C& a, const C& b) { return a.rank < b.rank; });
    std::size_t best = 0;
    for (std::size_t k = 1; k < all.size(); ++k)
      if (all[k].gain > all[best].gain + id3::kGainTieEpsilon) best = k;
    return winner_words(n_holders, all[best].holder, all[best].index);
  };
  const auto out = circuit_backend()(net, spec, inputs);
  ArgmaxResult r;
  r.holder = static_cast<std::size_t>(out[0][0]);
  r.candidate = static_cast<std::size_t>(out[1 + r.holder][0]);
  r.rank = holders[r.holder].candidates[r.candidate].first;
  return r;
}

}  // namespace gridtree::smpc
