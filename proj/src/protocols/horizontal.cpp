#include <functional>
#include <optional>

#include "common.hpp"
#include "gridtree/errors.hpp"

namespace gridtree::proto {

using namespace detail;

namespace {

class Horizontal {
 public:
  Horizontal(const Grid& g, net::Network& net, TreeBuilder& tb)
      : g_(g), net_(net), tb_(tb), ring_(g.group_parties(1)) {}

  void build(const std::string& id, const std::vector<Rows>& ctx, const std::vector<std::size_t>& remaining,
             const std::function<std::size_t()>& parent_majority) {
    const std::size_t k = ring_.size();
    std::vector<std::uint64_t> sizes(k);
    for (std::size_t p = 0; p < k; ++p) sizes[p] = ctx[p].size();
    if (smpc::secure_sum(net_, ring_, sizes, g_.count_domain(), "empty:size") == 0) {
      leaf(id, parent_majority());
      return;
    }
    if (remaining.empty()) {
      leaf(id, majority(ctx, "leaf:majority"));
      return;
    }
    std::vector<smpc::ClassVote> votes;
    for (std::size_t p = 0; p < k; ++p) {
      if (ctx[p].empty()) {
        votes.push_back(smpc::ClassVote::abstain());
        continue;
      }
      const id3::ClassHistogram hist{g_.parties[p].class_counts(ctx[p])};
      votes.push_back(hist.distinct() == 1 ? smpc::ClassVote::of(hist.majority()) : smpc::ClassVote::bottom());
    }
    smpc::SetProtocolOptions opts;
    opts.group = g_.group;
    opts.agreed_size = 1;
    opts.tag = "class:union";
    const auto verdict = smpc::secure_union_class_variant(net_, ring_, votes, opts);
    if (verdict.uniform) {
      leaf(id, static_cast<std::size_t>(verdict.value));
      return;
    }

    // default case: score every remaining attribute on shares
    const auto fp = g_.fixed_point();
    const auto& ref = g_.parties[0];
    smpc::ScoreHolder holder;
    holder.alice = ring_.back();
    holder.bob = ring_.front();
    auto term = [&](const std::vector<std::uint64_t>& counts, std::vector<std::uint64_t>& a,
                    std::vector<std::uint64_t>& b) {
      const auto sh = smpc::sum_to_shares(net_, ring_, counts, smpc::SumDomain::ring64(), "gain:sum");
      const auto [sa, sb] = smpc::x_ln_x(net_, sh.alice, {sh.masked, 0}, sh.bob, {sh.neg_mask, 0}, fp, "gain:xlnx");
      a.push_back(sa.value);
      b.push_back(sb.value);
    };
    for (auto a : remaining) {
      const std::size_t col = ref.attr_cols[a];
      smpc::ScoreInput in;
      in.rank = ref.ranks[a];
      for (std::uint32_t code = 0; code < ref.domain_size(col); ++code) {
        std::vector<Rows> part(k);
        std::vector<std::uint64_t> n(k);
        for (std::size_t p = 0; p < k; ++p) {
          part[p] = g_.parties[p].filter(ctx[p], col, code);
          n[p] = part[p].size();
        }
        term(n, in.neg_a, in.neg_b);
        for (std::size_t c = 0; c < g_.class_domain.size(); ++c) {
          for (std::size_t p = 0; p < k; ++p) n[p] = g_.parties[p].class_counts(part[p])[c];
          term(n, in.pos_a, in.pos_b);
        }
      }
      holder.candidates.push_back(std::move(in));
    }
    const auto best = smpc::circuit_argmax_score(net_, {holder}, ring_, {ring_}, g_.circuit_cost(), "gain:argmax");
    const std::size_t a_star = remaining[best.candidate];
    const std::size_t col = ref.attr_cols[a_star];

    tb_.interior(id, 1, ref.frag->columns[col], ref.frag->domains[col], ring_);
    std::vector<std::size_t> rest;
    for (auto a : remaining)
      if (a != a_star) rest.push_back(a);
    std::optional<std::size_t> maj;
    const std::function<std::size_t()> here = [&]() {
      if (!maj) maj = majority(ctx, "empty:majority");
      return *maj;
    };
    for (std::uint32_t code = 0; code < ref.domain_size(col); ++code) {
      std::vector<Rows> child(k);
      for (std::size_t p = 0; p < k; ++p) child[p] = g_.parties[p].filter(ctx[p], col, code);
      build(tb_.child_id(id, code), child, rest, here);
    }
  }

 private:
  const Grid& g_;
  net::Network& net_;
  TreeBuilder& tb_;
  std::vector<PartyId> ring_;

  void leaf(const std::string& id, std::size_t cls) { tb_.leaf(id, 1, g_.class_domain[cls], ring_); }

  // one secure sum per class value
  std::size_t majority(const std::vector<Rows>& ctx, const std::string& tag) {
    id3::ClassHistogram hist(std::vector<std::uint64_t>(g_.class_domain.size(), 0));
    for (std::size_t c = 0; c < g_.class_domain.size(); ++c) {
      std::vector<std::uint64_t> n;
      for (std::size_t p = 0; p < ring_.size(); ++p) n.push_back(g_.parties[p].class_counts(ctx[p])[c]);
      hist.counts[c] = smpc::secure_sum(net_, ring_, n, g_.count_domain(), tag);
    }
    return hist.majority();
  }
};

}  // namespace

RunResult ppid3_horizontal(const data::GridPartition& part, const std::vector<data::Fragment>& fragments,
                           const ProtocolConfig& cfg) {
  if (part.v != 1) throw ConfigError("the horizontal protocol needs v = 1");
  if (part.h <= 2) throw TooFewParties("the horizontal protocol needs more than two parties");
  const Grid g = make_grid(part, fragments, cfg);
  if (g.total_tuples == 0) throw EmptyTraining("no tuples to train on");
  net::Network net(g.all_parties(), cfg.seed);
  TreeBuilder tb(net.run_id(), g.v, g.h);
  Horizontal run(g, net, tb);
  std::vector<Rows> ctx;
  for (const auto& p : g.parties) ctx.push_back(p.all_rows());
  std::vector<std::size_t> attrs(g.parties[0].attr_cols.size());
  for (std::size_t a = 0; a < attrs.size(); ++a) attrs[a] = a;
  run.build(tb.root_id(), ctx, attrs, [] { return std::size_t{0}; });
  net.check_drained();
  return {tb.take(), net.transcript()};
}

}  // namespace gridtree::proto
