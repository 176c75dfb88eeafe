#include "common.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gridtree/errors.hpp"

namespace gridtree::proto::detail {

Rows PartyData::all_rows() const {
  Rows r(frag->rows.size());
  for (std::uint32_t k = 0; k < r.size(); ++k) r[k] = k;
  return r;
}

Rows PartyData::filter(const Rows& rows, std::size_t col, std::uint32_t code) const {
  Rows out;
  const auto& c = codes[col];
  for (auto r : rows)
    if (c[r] == code) out.push_back(r);
  return out;
}

std::vector<smpc::u128> PartyData::ids(const Rows& rows) const {
  std::vector<smpc::u128> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(items[r]);
  return out;
}

std::vector<std::uint64_t> PartyData::class_counts(const Rows& rows) const {
  std::vector<std::uint64_t> out(domain_size(*class_col), 0);
  for (auto r : rows) ++out[codes[*class_col][r]];
  return out;
}

std::vector<PartyId> Grid::group_parties(std::size_t i) const {
  std::vector<PartyId> out;
  for (std::size_t j = 1; j <= h; ++j) out.push_back(at(i, j).id);
  return out;
}

std::vector<PartyId> Grid::layer_parties(std::size_t j) const {
  std::vector<PartyId> out;
  for (std::size_t i = 1; i <= v; ++i) out.push_back(at(i, j).id);
  return out;
}

std::vector<PartyId> Grid::all_parties() const {
  std::vector<PartyId> out;
  for (const auto& p : parties) out.push_back(p.id);
  return out;
}

std::size_t Grid::agreed_size() const {
  return cfg.padding == ProtocolConfig::Padding::TotalTuples ? total_tuples : max_fragment;
}

smpc::FixedPointConfig Grid::fixed_point() const {
  smpc::FixedPointConfig f;
  f.frac_bits = cfg.fixed_point_bits;
  f.n_terms = cfg.taylor_terms;
  f.series = cfg.series;
  f.zero_guard = true;
  f.key_bits = cfg.key_bits;
  f.value_bits = count_domain().bits();
  return f;
}

Grid make_grid(const data::GridPartition& part, const std::vector<data::Fragment>& fragments,
               const ProtocolConfig& cfg) {
  if (cfg.key_bits < 32 || cfg.key_bits > 128) throw ConfigError("key length must be 32..128 bits");
  if (cfg.taylor_terms < 1) throw ConfigError("at least one series term is required");
  if (cfg.fixed_point_bits < 8 || cfg.fixed_point_bits > 40)
    throw ConfigError("fixed-point fraction must be 8..40 bits");
  Grid g;
  g.v = part.v;
  g.h = part.h;
  g.cfg = cfg;
  g.group = smpc::CommutativeGroup::for_bits(cfg.key_bits);

  std::map<data::PartyCoord, const data::Fragment*> by;
  for (const auto& f : fragments) {
    if (f.owner.i < 1 || f.owner.i > g.v || f.owner.j < 1 || f.owner.j > g.h)
      throw ConfigError("fragment outside the grid");
    if (!by.emplace(f.owner, &f).second) throw ConfigError("two fragments for one party");
  }
  for (std::size_t i = 1; i <= g.v; ++i)
    for (std::size_t j = 1; j <= g.h; ++j)
      if (!by.count({i, j}))
        throw IncompleteGrid("missing fragment for P_" + std::to_string(i) + "_" + std::to_string(j));

  for (std::size_t i = 1; i <= g.v; ++i)
    for (std::size_t j = 1; j <= g.h; ++j) g.fragments.push_back(*by.at({i, j}));
  data::harmonize_domains(g.fragments);

  std::size_t offset = 1;
  std::map<smpc::u128, std::string> item_owner;
  for (std::size_t i = 1; i <= g.v; ++i) {
    const auto& cols = g.fragments[(i - 1) * g.h].columns;
    for (std::size_t j = 1; j <= g.h; ++j) {
      const auto& f = g.fragments[(i - 1) * g.h + (j - 1)];
      if (f.columns != cols) throw ConfigError("fragments of vertical group " + std::to_string(i) + " differ in columns");
      const bool has_class = f.has_class();
      if (has_class != (i == g.v))
        throw ConfigError("the class attribute must be held by exactly the last vertical group");
      PartyData pd;
      pd.id = {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
      pd.frag = &f;
      for (std::size_t c = 1; c < f.columns.size(); ++c) {
        if (f.columns[c] == f.class_attr) {
          pd.class_col = c;
          continue;
        }
        pd.attr_cols.push_back(c);
        pd.ranks.push_back(offset + c - 1);
      }
      pd.codes.assign(f.columns.size(), {});
      for (std::size_t c = 1; c < f.columns.size(); ++c) {
        const auto& dom = f.domains[c];
        auto& codes = pd.codes[c];
        codes.reserve(f.rows.size());
        for (const auto& r : f.rows) {
          auto it = std::lower_bound(dom.begin(), dom.end(), r[c]);
          if (it == dom.end() || *it != r[c]) throw SchemaError("value '" + r[c] + "' outside its domain");
          codes.push_back(static_cast<std::uint32_t>(it - dom.begin()));
        }
      }
      for (const auto& r : f.rows) {
        const auto x = smpc::hash_payload(r[0], g.group->payload_bits());
        auto [it, fresh] = item_owner.emplace(x, r[0]);
        if (!fresh && it->second != r[0])
          throw EncodingError("identifiers '" + r[0] + "' and '" + it->second + "' collide; use a longer key");
        pd.items.push_back(x);
      }
      if (i == 1) g.total_tuples += f.rows.size();
      g.max_fragment = std::max(g.max_fragment, f.rows.size());
      g.parties.push_back(std::move(pd));
    }
    offset += cols.size() - 1;
  }
  const auto& last = g.at(g.v, 1);
  g.class_domain = last.frag->domains[*last.class_col];
  if (g.class_domain.empty()) throw EmptyTraining("no class values");
  return g;
}

void check_grid(const data::GridPartition& part) {
  if (part.v < 2 || part.h < 2) throw ConfigError("grid protocols need v >= 2 and h >= 2");
}

std::vector<Rows> initial_context(const Grid& g) {
  std::vector<Rows> ctx;
  for (const auto& p : g.parties) ctx.push_back(p.all_rows());
  return ctx;
}

std::vector<std::vector<std::size_t>> initial_remaining(const Grid& g) {
  std::vector<std::vector<std::size_t>> rem(g.v);
  for (std::size_t i = 1; i <= g.v; ++i)
    for (std::size_t a = 0; a < g.at(i, 1).attr_cols.size(); ++a) rem[i - 1].push_back(a);
  return rem;
}

bool attributes_left(const Grid& g, net::Network& net,
                     const std::vector<std::vector<std::size_t>>& remaining) {
  std::vector<PartyId> reps;
  std::vector<std::uint64_t> counts;
  std::uint64_t bound = 0;
  for (std::size_t i = 1; i <= g.v; ++i) {
    reps.push_back(g.at(i, 1).id);
    counts.push_back(remaining[i - 1].size());
    bound += g.at(i, 1).attr_cols.size();
  }
  const auto dom = smpc::SumDomain::above(bound);
  const auto sh = smpc::sum_to_shares(net, reps, counts, dom, "empty:sum");
  return !smpc::circuit_is_zero(net, sh, g.all_parties(), smpc::CircuitCost{g.cfg.key_bits, dom.bits()}, "empty:iszero");
}

TreeBuilder::TreeBuilder(std::string run_id, std::size_t v, std::size_t h) {
  tree_.run_id = std::move(run_id);
  tree_.v = v;
  tree_.h = h;
  root_ = tree_.run_id + ":r";
  tree_.root = root_;
}

std::string TreeBuilder::child_id(const std::string& parent, std::size_t ordinal) const {
  return parent + "." + std::to_string(ordinal);
}

void TreeBuilder::leaf(const std::string& id, std::size_t owner_group, const std::string& label,
                       const std::vector<PartyId>& holders) {
  tree_.nodes.push_back({id, owner_group, {}});
  for (auto p : holders) tree_.payloads[p][id] = LeafPayload{label};
}

void TreeBuilder::interior(const std::string& id, std::size_t owner_group, const std::string& attribute,
                           const std::vector<std::string>& values, const std::vector<PartyId>& holders) {
  SkeletonNode n{id, owner_group, {}};
  InteriorPayload pl{attribute, {}};
  for (std::size_t k = 0; k < values.size(); ++k) {
    n.children.push_back(child_id(id, k));
    pl.branches.push_back({values[k], n.children.back()});
  }
  tree_.nodes.push_back(std::move(n));
  for (auto p : holders) tree_.payloads[p][id] = pl;
}

}  // namespace gridtree::proto::detail
