#include "gridtree/id3.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gridtree/errors.hpp"

namespace gridtree::id3 {

std::uint64_t ClassHistogram::total() const {
  std::uint64_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

std::size_t ClassHistogram::distinct() const {
  return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(),
                                                [](std::uint64_t c) { return c > 0; }));
}

std::size_t ClassHistogram::majority() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i)
    if (counts[i] > counts[best]) best = i;
  return best;
}

double entropy(const ClassHistogram& hist) {
  const std::uint64_t n = hist.total();
  if (n == 0) return 0.0;
  double h = 0.0;
  for (auto c : hist.counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

double info_gain(const ClassHistogram& parent, std::span<const ClassHistogram> children) {
  const std::uint64_t n = parent.total();
  std::uint64_t sum = 0;
  for (const auto& c : children) sum += c.total();
  if (sum != n)
    throw HistogramMismatch("children total " + std::to_string(sum) + " != parent total " +
                            std::to_string(n));
  if (n == 0) return 0.0;
  double rest = 0.0;
  for (const auto& c : children) {
    const std::uint64_t nv = c.total();
    if (nv == 0) continue;
    rest += static_cast<double>(nv) / static_cast<double>(n) * entropy(c);
  }
  return entropy(parent) - rest;
}

PlainTree PlainTree::leaf(std::string label) {
  PlainTree t;
  t.kind = Kind::Leaf;
  t.label = std::move(label);
  return t;
}

std::size_t PlainTree::depth() const {
  std::size_t d = 0;
  for (const auto& b : children) d = std::max(d, 1 + b.child.depth());
  return d;
}

std::size_t PlainTree::node_count() const {
  std::size_t n = 1;
  for (const auto& b : children) n += b.child.node_count();
  return n;
}

bool operator==(const Branch& a, const Branch& b) {
  return a.value == b.value && a.child == b.child;
}

bool operator==(const PlainTree& a, const PlainTree& b) {
  if (a.kind != b.kind) return false;
  if (a.is_leaf()) return a.label == b.label;
  return a.attribute == b.attribute && a.children == b.children;
}

nlohmann::json to_json(const PlainTree& tree) {
  if (tree.is_leaf()) return {{"kind", "leaf"}, {"class", tree.label}};
  nlohmann::json children = nlohmann::json::array();
  for (const auto& b : tree.children)
    children.push_back({{"value", b.value}, {"node", to_json(b.child)}});
  return {{"kind", "interior"}, {"attribute", tree.attribute}, {"children", children}};
}

PlainTree plain_tree_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "leaf") return PlainTree::leaf(j.at("class").get<std::string>());
  if (kind != "interior") throw SchemaError("unknown tree node kind '" + kind + "'");
  PlainTree t;
  t.kind = PlainTree::Kind::Interior;
  t.attribute = j.at("attribute").get<std::string>();
  for (const auto& c : j.at("children"))
    t.children.push_back({c.at("value").get<std::string>(), plain_tree_from_json(c.at("node"))});
  return t;
}

namespace {

void render_into(const PlainTree& t, const std::string& indent, std::ostringstream& os) {
  if (t.is_leaf()) {
    os << indent << "-> " << t.label << '\n';
    return;
  }
  for (const auto& b : t.children) {
    os << indent << t.attribute << " = " << b.value << '\n';
    render_into(b.child, indent + "  ", os);
  }
}

}  // namespace

std::string render_text(const PlainTree& tree) {
  std::ostringstream os;
  render_into(tree, "", os);
  return os.str();
}

ClassHistogram histogram(const data::Relation& rel, std::span<const std::size_t> rows) {
  const std::size_t cc = rel.class_column();
  const auto& dom = rel.domain(cc);
  ClassHistogram h(std::vector<std::uint64_t>(dom.size(), 0));
  for (auto r : rows) {
    auto it = std::lower_bound(dom.begin(), dom.end(), rel.tuples[r][cc]);
    ++h.counts[static_cast<std::size_t>(it - dom.begin())];
  }
  return h;
}

namespace {

std::vector<std::vector<std::size_t>> split_rows(const data::Relation& rel,
                                                 std::span<const std::size_t> rows,
                                                 std::size_t col) {
  const auto& dom = rel.domain(col);
  std::vector<std::vector<std::size_t>> parts(dom.size());
  for (auto r : rows) {
    auto it = std::lower_bound(dom.begin(), dom.end(), rel.tuples[r][col]);
    parts[static_cast<std::size_t>(it - dom.begin())].push_back(r);
  }
  return parts;
}

}  // namespace

std::vector<ClassHistogram> split_histograms(const data::Relation& rel,
                                             std::span<const std::size_t> rows, std::size_t col) {
  std::vector<ClassHistogram> out;
  for (const auto& part : split_rows(rel, rows, col)) out.push_back(histogram(rel, part));
  return out;
}

double Decision::margin() const {
  if (gains.size() < 2) return std::numeric_limits<double>::infinity();
  double other = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < gains.size(); ++k)
    if (k != chosen) other = std::max(other, gains[k]);
  return gains[chosen] - other;
}

std::size_t argmax_gain(std::span<const double> gains) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < gains.size(); ++k)
    if (gains[k] > gains[best] + kGainTieEpsilon) best = k;
  return best;
}

Decision evaluate_split(const data::Relation& rel, std::span<const std::size_t> rows,
                        std::span<const std::size_t> candidates) {
  Decision d;
  d.candidates.assign(candidates.begin(), candidates.end());
  std::sort(d.candidates.begin(), d.candidates.end());
  const ClassHistogram parent = histogram(rel, rows);
  for (auto col : d.candidates) {
    const auto children = split_histograms(rel, rows, col);
    d.gains.push_back(info_gain(parent, children));
  }
  d.chosen = argmax_gain(d.gains);
  return d;
}

namespace {

PlainTree build(const data::Relation& rel, const std::vector<std::size_t>& rows,
                std::vector<std::size_t> attrs, std::size_t parent_majority,
                std::vector<Decision>* trace) {
  const auto& classes = rel.domain(rel.class_column());
  if (rows.empty()) return PlainTree::leaf(classes[parent_majority]);
  const ClassHistogram hist = histogram(rel, rows);
  if (attrs.empty()) return PlainTree::leaf(classes[hist.majority()]);
  if (hist.distinct() == 1) return PlainTree::leaf(classes[hist.majority()]);

  Decision d = evaluate_split(rel, rows, attrs);
  const std::size_t col = d.candidates[d.chosen];
  if (trace) trace->push_back(d);
  attrs.erase(std::find(attrs.begin(), attrs.end(), col));

  PlainTree t;
  t.kind = PlainTree::Kind::Interior;
  t.attribute = rel.schema[col];
  const auto parts = split_rows(rel, rows, col);
  const auto& dom = rel.domain(col);
  for (std::size_t k = 0; k < dom.size(); ++k)
    t.children.push_back({dom[k], build(rel, parts[k], attrs, hist.majority(), trace)});
  return t;
}

}  // namespace

PlainTree id3_build(const data::Relation& rel, const std::vector<std::string>& attrs,
                    std::vector<Decision>* trace) {
  if (rel.size() == 0) throw EmptyTraining("cannot build a tree from an empty relation");
  std::vector<std::size_t> cols;
  for (const auto& a : attrs) {
    const std::size_t c = rel.column(a);
    if (c == rel.class_column()) throw SchemaError("class attribute cannot be a split attribute");
    if (c == rel.id_column()) throw SchemaError("key attribute cannot be a split attribute");
    cols.push_back(c);
  }
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  std::vector<std::size_t> rows(rel.size());
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
  return build(rel, rows, cols, 0, trace);
}

std::vector<std::string> default_attributes(const data::Relation& rel) {
  std::vector<std::string> out;
  for (auto c : rel.attribute_columns()) out.push_back(rel.schema[c]);
  return out;
}

std::string classify_plain(const PlainTree& tree, const std::map<std::string, std::string>& tuple) {
  const PlainTree* node = &tree;
  while (!node->is_leaf()) {
    auto it = tuple.find(node->attribute);
    if (it == tuple.end()) throw UnseenValue("tuple has no value for '" + node->attribute + "'");
    auto b = std::find_if(node->children.begin(), node->children.end(),
                          [&](const Branch& br) { return br.value == it->second; });
    if (b == node->children.end())
      throw UnseenValue("value '" + it->second + "' of '" + node->attribute + "' has no branch");
    node = &b->child;
  }
  return node->label;
}

std::string classify_plain(const PlainTree& tree, const std::vector<std::string>& schema,
                           const data::Row& row) {
  std::map<std::string, std::string> t;
  for (std::size_t c = 0; c < schema.size() && c < row.size(); ++c) t[schema[c]] = row[c];
  return classify_plain(tree, t);
}

}  // namespace gridtree::id3
