#include "common.hpp"
#include "gridtree/errors.hpp"

namespace gridtree::proto {

using namespace detail;

namespace {

class VMerge {
 public:
  VMerge(const Grid& g, net::Network& net, TreeBuilder& tb) : g_(g), net_(net), tb_(tb) {}

  void build(const std::string& id, const std::vector<Rows>& ctx,
             const std::vector<std::vector<std::size_t>>& remaining, std::size_t parent_majority) {
    const std::size_t v = g_.v, h = g_.h, d = g_.class_domain.size();
    const bool any_left = attributes_left(g_, net_, remaining);

    // per-layer class counts via intersection sizes, then summed over layers
    std::vector<smpc::SumShares> counts;
    for (std::size_t c = 0; c < d; ++c) {
      std::vector<std::uint64_t> n(h);
      for (std::size_t j = 1; j <= h; ++j)
        n[j - 1] = intersect(j, v, ctx, Select{}, Select{true, c, false, 0, 0}, "class:isect");
      counts.push_back(smpc::sum_to_shares(net_, g_.group_parties(v), n, g_.count_domain(), "class:sum"));
    }
    const auto summary = smpc::circuit_class_summary(net_, counts, g_.all_parties(), g_.group_parties(v),
                                                     g_.circuit_cost(), "class:summary");
    using V = smpc::ClassSummary::Verdict;
    if (summary.verdict == V::Empty) return leaf(id, parent_majority);
    if (!any_left || summary.verdict == V::Uniform) return leaf(id, summary.majority);

    // default case: N_a and N_ac per layer, summed within the owning group
    const auto fp = g_.fixed_point();
    std::vector<smpc::ScoreHolder> holders;
    std::vector<std::vector<PartyId>> owners;
    for (std::size_t i = 1; i <= v; ++i) {
      const PartyData& ref = g_.at(i, 1);
      const auto group = g_.group_parties(i);
      smpc::ScoreHolder sh;
      sh.alice = group.back();
      sh.bob = group.front();
      auto term = [&](const std::vector<std::uint64_t>& n, std::vector<std::uint64_t>& a,
                      std::vector<std::uint64_t>& b) {
        const auto s = smpc::sum_to_shares(net_, group, n, smpc::SumDomain::ring64(), "gain:sum");
        const auto [sa, sb] = smpc::x_ln_x(net_, s.alice, {s.masked, 0}, s.bob, {s.neg_mask, 0}, fp, "gain:xlnx");
        a.push_back(sa.value);
        b.push_back(sb.value);
      };
      for (auto a : remaining[i - 1]) {
        const std::size_t col = ref.attr_cols[a];
        smpc::ScoreInput in;
        in.rank = ref.ranks[a];
        for (std::uint32_t code = 0; code < ref.domain_size(col); ++code) {
          const Select attr{false, 0, true, col, code};
          std::vector<std::uint64_t> n(h);
          for (std::size_t j = 1; j <= h; ++j) n[j - 1] = intersect(j, i, ctx, attr, Select{}, "gain:isect");
          term(n, in.neg_a, in.neg_b);
          for (std::size_t c = 0; c < d; ++c) {
            const Select cls{true, c, false, 0, 0};
            for (std::size_t j = 1; j <= h; ++j) n[j - 1] = intersect(j, i, ctx, attr, cls, "gain:isect");
            term(n, in.pos_a, in.pos_b);
          }
        }
        sh.candidates.push_back(std::move(in));
      }
      holders.push_back(std::move(sh));
      owners.push_back(group);
    }
    const auto best = smpc::circuit_argmax_score(net_, holders, g_.all_parties(), owners, g_.circuit_cost(), "gain:argmax");
    const std::size_t owner = best.holder + 1;
    const std::size_t a_star = remaining[owner - 1][best.candidate];
    const PartyData& ref = g_.at(owner, 1);
    const std::size_t col = ref.attr_cols[a_star];

    tb_.interior(id, owner, ref.frag->columns[col], ref.frag->domains[col], g_.group_parties(owner));
    auto rest = remaining;
    std::erase(rest[owner - 1], a_star);
    for (std::uint32_t code = 0; code < ref.domain_size(col); ++code) {
      auto child = ctx;
      for (std::size_t j = 1; j <= h; ++j) {
        const auto idx = g_.index(owner, j);
        child[idx] = g_.parties[idx].filter(ctx[idx], col, code);
      }
      build(tb_.child_id(id, code), child, rest, summary.majority);
    }
  }

 private:
  // Extra row filters: by class value (class holders only) and by an
  // attribute value (the owning group only).
  struct Select {
    bool by_class = false;
    std::size_t cls = 0;
    bool by_attr = false;
    std::size_t col = 0;
    std::uint32_t code = 0;
  };

  const Grid& g_;
  net::Network& net_;
  TreeBuilder& tb_;

  void leaf(const std::string& id, std::size_t cls) {
    tb_.leaf(id, g_.v, g_.class_domain[cls], g_.group_parties(g_.v));
  }

  // Intersection size over layer j. Group `owner` applies `attr`, the class
  // group applies `cls`; the result goes to P_{owner, j}.
  std::uint64_t intersect(std::size_t j, std::size_t owner, const std::vector<Rows>& ctx, const Select& attr,
                          const Select& cls, const std::string& tag) {
    std::vector<std::vector<smpc::u128>> sets;
    for (std::size_t i = 1; i <= g_.v; ++i) {
      const PartyData& p = g_.at(i, j);
      Rows rows = ctx[g_.index(i, j)];
      if (i == owner && attr.by_attr) rows = p.filter(rows, attr.col, attr.code);
      if (i == g_.v && cls.by_class) rows = p.filter(rows, *p.class_col, static_cast<std::uint32_t>(cls.cls));
      sets.push_back(p.ids(rows));
    }
    smpc::SetProtocolOptions opts;
    opts.group = g_.group;
    opts.agreed_size = g_.agreed_size();
    opts.min_parties = 2;
    opts.tag = tag;
    const PartyId to = g_.at(owner, j).id;
    return smpc::secure_intersection_size(net_, g_.layer_parties(j), sets, opts, std::span(&to, 1));
  }
};

}  // namespace

RunResult ppid3_grid_vmerge(const data::GridPartition& part, const std::vector<data::Fragment>& fragments,
                            const ProtocolConfig& cfg) {
  check_grid(part);
  const Grid g = make_grid(part, fragments, cfg);
  if (g.total_tuples == 0) throw EmptyTraining("no tuples to train on");
  net::Network net(g.all_parties(), cfg.seed);
  TreeBuilder tb(net.run_id(), g.v, g.h);
  VMerge run(g, net, tb);
  run.build(tb.root_id(), initial_context(g), initial_remaining(g), 0);
  net.check_drained();
  return {tb.take(), net.transcript()};
}

}  // namespace gridtree::proto
