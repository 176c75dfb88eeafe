#include "common.hpp"
#include "gridtree/errors.hpp"

namespace gridtree::proto {

using namespace detail;

namespace {

using Enc = std::vector<smpc::u128>;

class HMerge {
 public:
  HMerge(const Grid& g, net::Network& net, TreeBuilder& tb) : g_(g), net_(net), tb_(tb) {
    // the scheduler hands layer j one key shared by all vertical groups
    for (std::size_t j = 1; j <= g.h; ++j) keys_.push_back(smpc::generate_key(g.group, net.rng(PartyId::ideal())));
  }

  void build(const std::string& id, const std::vector<Rows>& ctx,
             const std::vector<std::vector<std::size_t>>& remaining, std::size_t parent_majority) {
    const std::size_t v = g_.v, d = g_.class_domain.size();
    const bool any_left = attributes_left(g_, net_, remaining);

    // horizontal merge of every group's context, class holders split by class
    std::vector<Enc> u(v);
    for (std::size_t i = 1; i < v; ++i) u[i - 1] = merge(i, ctx, [](const PartyData&, const Rows& r) { return r; }, "class:union");
    std::vector<Enc> uc(d);
    for (std::size_t c = 0; c < d; ++c)
      uc[c] = merge(v, ctx, [c](const PartyData& p, const Rows& r) { return p.filter(r, *p.class_col, c); }, "class:union");
    const PartyId class_rep = g_.at(v, 1).id;
    for (std::size_t i = 1; i < v; ++i) ship(g_.at(i, 1).id, class_rep, u[i - 1], "class:ship");

    std::vector<smpc::SumShares> counts;
    for (std::size_t c = 0; c < d; ++c) {
      std::vector<const Enc*> sets{&uc[c]};
      for (std::size_t i = 1; i < v; ++i) sets.push_back(&u[i - 1]);
      smpc::SumShares s;
      s.alice = s.bob = class_rep;
      s.domain = g_.count_domain();
      s.masked = smpc::encrypted_intersection_size(sets);
      counts.push_back(s);
    }
    const auto summary = smpc::circuit_class_summary(net_, counts, g_.all_parties(), g_.group_parties(v),
                                                     g_.circuit_cost(), "class:summary");
    using V = smpc::ClassSummary::Verdict;
    if (summary.verdict == V::Empty) return leaf(id, parent_majority);
    if (!any_left || summary.verdict == V::Uniform) return leaf(id, summary.majority);

    // default case: each group's representative scores its own attributes
    for (std::size_t i = 1; i < v; ++i) {
      const PartyId rep = g_.at(i, 1).id;
      for (std::size_t o = 1; o < v; ++o)
        if (o != i) ship(g_.at(o, 1).id, rep, u[o - 1], "gain:ship");
      for (std::size_t c = 0; c < d; ++c) ship(class_rep, rep, uc[c], "gain:ship");
    }
    std::vector<smpc::GainHolder> holders;
    std::vector<std::vector<PartyId>> owners;
    for (std::size_t i = 1; i <= v; ++i) {
      const PartyData& ref = g_.at(i, 1);
      smpc::GainHolder gh;
      gh.party = ref.id;
      for (auto a : remaining[i - 1]) {
        const std::size_t col = ref.attr_cols[a];
        std::vector<id3::ClassHistogram> children;
        id3::ClassHistogram parent(std::vector<std::uint64_t>(d, 0));
        for (std::uint32_t code = 0; code < ref.domain_size(col); ++code) {
          const Enc ua = merge(i, ctx, [col, code](const PartyData& p, const Rows& r) { return p.filter(r, col, code); },
                               "gain:union");
          id3::ClassHistogram hist(std::vector<std::uint64_t>(d, 0));
          for (std::size_t c = 0; c < d; ++c) {
            std::vector<const Enc*> sets{&ua, &uc[c]};
            for (std::size_t o = 1; o < v; ++o)
              if (o != i) sets.push_back(&u[o - 1]);
            hist.counts[c] = smpc::encrypted_intersection_size(sets);
            parent.counts[c] += hist.counts[c];
          }
          children.push_back(std::move(hist));
        }
        gh.candidates.push_back({ref.ranks[a], id3::info_gain(parent, children)});
      }
      holders.push_back(std::move(gh));
      owners.push_back(g_.group_parties(i));
    }
    const auto best = smpc::circuit_argmax_gain(net_, holders, g_.all_parties(), owners, g_.circuit_cost(), "gain:argmax");
    const std::size_t owner = best.holder + 1;
    const std::size_t a_star = remaining[owner - 1][best.candidate];
    const PartyData& ref = g_.at(owner, 1);
    const std::size_t col = ref.attr_cols[a_star];

    tb_.interior(id, owner, ref.frag->columns[col], ref.frag->domains[col], g_.group_parties(owner));
    auto rest = remaining;
    std::erase(rest[owner - 1], a_star);
    for (std::uint32_t code = 0; code < ref.domain_size(col); ++code) {
      auto child = ctx;
      for (std::size_t j = 1; j <= g_.h; ++j) {
        const auto idx = g_.index(owner, j);
        child[idx] = g_.parties[idx].filter(ctx[idx], col, code);
      }
      build(tb_.child_id(id, code), child, rest, summary.majority);
    }
  }

 private:
  const Grid& g_;
  net::Network& net_;
  TreeBuilder& tb_;
  std::vector<smpc::CommutativeKey> keys_;

  void leaf(const std::string& id, std::size_t cls) {
    tb_.leaf(id, g_.v, g_.class_domain[cls], g_.group_parties(g_.v));
  }

  // Encrypted union over vertical group i of the selected rows, held by P_i1.
  template <class Select>
  Enc merge(std::size_t i, const std::vector<Rows>& ctx, Select select, const std::string& tag) {
    std::vector<std::vector<smpc::u128>> sets;
    for (std::size_t j = 1; j <= g_.h; ++j) {
      const auto& p = g_.at(i, j);
      sets.push_back(p.ids(select(p, ctx[g_.index(i, j)])));
    }
    smpc::SetProtocolOptions opts;
    opts.group = g_.group;
    opts.agreed_size = g_.agreed_size();
    opts.keys = keys_;
    opts.min_parties = 2;
    opts.tag = tag;
    return smpc::secure_union_encrypted(net_, g_.group_parties(i), sets, opts).elements;
  }

  void ship(PartyId from, PartyId to, const Enc& set, const std::string& tag) {
    if (from == to) return;
    net_.send(from, to, tag, net::Payload(set.begin(), set.end()),
              static_cast<std::uint64_t>(set.size()) * g_.group->bits());
    net_.tick();
    net_.recv(to, from, tag);
  }
};

}  // namespace

RunResult ppid3_grid_hmerge(const data::GridPartition& part, const std::vector<data::Fragment>& fragments,
                            const ProtocolConfig& cfg) {
  check_grid(part);
  const Grid g = make_grid(part, fragments, cfg);
  if (g.total_tuples == 0) throw EmptyTraining("no tuples to train on");
  net::Network net(g.all_parties(), cfg.seed);
  TreeBuilder tb(net.run_id(), g.v, g.h);
  HMerge run(g, net, tb);
  run.build(tb.root_id(), initial_context(g), initial_remaining(g), 0);
  net.check_drained();
  return {tb.take(), net.transcript()};
}

}  // namespace gridtree::proto
