#include "gridtree/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gridtree/errors.hpp"
#include "gridtree/rng.hpp"

namespace gridtree::data {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q.push_back('"');
    q.push_back(c);
  }
  q.push_back('"');
  return q;
}

bool read_record(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

std::vector<std::vector<std::string>> infer_domains(std::size_t ncols, const std::vector<Row>& rows) {
  std::vector<std::set<std::string>> sets(ncols);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < ncols; ++c) sets[c].insert(r[c]);
  std::vector<std::vector<std::string>> out(ncols);
  for (std::size_t c = 0; c < ncols; ++c) out[c].assign(sets[c].begin(), sets[c].end());
  return out;
}

}  // namespace

Relation Relation::make(std::vector<std::string> schema, std::string id_attr,
                        std::string class_attr, std::vector<Row> tuples) {
  Relation r;
  r.schema = std::move(schema);
  r.id_attr = std::move(id_attr);
  r.class_attr = std::move(class_attr);
  r.tuples = std::move(tuples);
  for (const auto& row : r.tuples)
    if (row.size() != r.schema.size())
      throw SchemaError("row has " + std::to_string(row.size()) + " fields, schema has " +
                        std::to_string(r.schema.size()));
  r.domains = infer_domains(r.schema.size(), r.tuples);
  r.validate();
  return r;
}

std::size_t Relation::column(std::string_view name) const {
  auto it = std::find(schema.begin(), schema.end(), name);
  if (it == schema.end()) throw SchemaError("no column named '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - schema.begin());
}

bool Relation::has_column(std::string_view name) const {
  return std::find(schema.begin(), schema.end(), name) != schema.end();
}

std::vector<std::size_t> Relation::attribute_columns() const {
  const std::size_t id = id_column(), cls = class_column();
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < schema.size(); ++c)
    if (c != id && c != cls) out.push_back(c);
  return out;
}

void Relation::validate() const {
  if (!has_column(id_attr)) throw SchemaError("id column '" + id_attr + "' missing");
  if (!has_column(class_attr)) throw SchemaError("class column '" + class_attr + "' missing");
  if (id_attr == class_attr) throw SchemaError("id and class column must differ");
  if (std::set<std::string>(schema.begin(), schema.end()).size() != schema.size())
    throw SchemaError("duplicate column names");
  if (domains.size() != schema.size()) throw SchemaError("domain count mismatch");
  const std::size_t id = id_column();
  std::set<std::string> seen;
  for (const auto& row : tuples) {
    if (row.size() != schema.size()) throw SchemaError("row width mismatch");
    if (!seen.insert(row[id]).second) throw DuplicateKey("duplicate id '" + row[id] + "'");
    for (std::size_t c = 0; c < schema.size(); ++c)
      if (!std::binary_search(domains[c].begin(), domains[c].end(), row[c]))
        throw SchemaError("value '" + row[c] + "' outside domain of " + schema[c]);
  }
}

bool equivalent(const Relation& a, const Relation& b) {
  if (a.id_attr != b.id_attr || a.class_attr != b.class_attr) return false;
  if (a.size() != b.size()) return false;
  if (std::multiset<std::string>(a.schema.begin(), a.schema.end()) !=
      std::multiset<std::string>(b.schema.begin(), b.schema.end()))
    return false;
  auto canon = [](const Relation& r) {
    std::vector<std::size_t> order(r.schema.size());
    for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return r.schema[x] < r.schema[y]; });
    std::vector<Row> rows;
    rows.reserve(r.size());
    for (const auto& t : r.tuples) {
      Row out;
      for (auto c : order) out.push_back(t[c]);
      rows.push_back(std::move(out));
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  return canon(a) == canon(b);
}

Relation parse_relation_csv(std::istream& in, const std::string& id_attr,
                            const std::string& class_attr) {
  std::string line;
  if (!read_record(in, line)) throw EmptyInput("input has no header row");
  auto header = split_csv_line(line);
  std::vector<Row> rows;
  while (read_record(in, line)) {
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw SchemaError("line " + std::to_string(rows.size() + 2) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(header.size()));
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw EmptyInput("input has no tuples");
  return Relation::make(std::move(header), id_attr, class_attr, std::move(rows));
}

Relation load_relation(const std::string& path, const std::string& id_attr,
                       const std::string& class_attr) {
  std::ifstream in(path);
  if (!in) throw EmptyInput("cannot open '" + path + "'");
  return parse_relation_csv(in, id_attr, class_attr);
}

void write_relation_csv(std::ostream& out, const std::vector<std::string>& header,
                        const std::vector<Row>& rows) {
  auto write_row = [&](const Row& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out << ',';
      out << csv_field(r[c]);
    }
    out << '\n';
  };
  write_row(header);
  for (const auto& r : rows) write_row(r);
}

GridPartition make_partition(const Relation& rel, std::size_t v, std::size_t h,
                             std::uint64_t seed) {
  const auto attrs = rel.attribute_columns();
  const std::size_t non_key = attrs.size() + 1;  // attributes plus the class
  if (v < 1 || v >= non_key)
    throw PartitionError("v=" + std::to_string(v) + " must satisfy 1 <= v < " +
                         std::to_string(non_key));
  if (h < 1 || h > rel.size())
    throw PartitionError("h=" + std::to_string(h) + " must satisfy 1 <= h <= " +
                         std::to_string(rel.size()));
  GridPartition p;
  p.v = v;
  p.h = h;
  p.seed = seed;
  p.attr_groups.assign(v, {});
  for (std::size_t k = 0; k < attrs.size(); ++k)
    p.attr_groups[k % v].push_back(rel.schema[attrs[k]]);
  p.attr_groups[v - 1].push_back(rel.class_attr);

  std::vector<std::string> ids;
  ids.reserve(rel.size());
  const std::size_t idc = rel.id_column();
  for (const auto& t : rel.tuples) ids.push_back(t[idc]);
  Rng rng(seed);
  rng.shuffle(ids);
  p.tuple_groups.assign(h, {});
  for (std::size_t k = 0; k < ids.size(); ++k) p.tuple_groups[k % h].push_back(ids[k]);
  for (auto& g : p.tuple_groups) std::sort(g.begin(), g.end());
  return p;
}

void validate_partition(const Relation& rel, const GridPartition& part) {
  if (part.v < 1 || part.h < 1) throw PartitionError("v and h must be >= 1");
  if (part.attr_groups.size() != part.v || part.tuple_groups.size() != part.h)
    throw PartitionError("block counts do not match v/h");
  if (part.v >= rel.attribute_columns().size() + 1)
    throw PartitionError("v must be smaller than the number of non-key attributes");
  std::set<std::string> attrs;
  for (const auto& g : part.attr_groups)
    for (const auto& a : g) {
      if (a == rel.id_attr) throw PartitionError("key attribute placed in a block");
      if (!rel.has_column(a)) throw PartitionError("unknown attribute '" + a + "'");
      if (!attrs.insert(a).second) throw PartitionError("attribute '" + a + "' in two blocks");
    }
  if (attrs.size() != rel.schema.size() - 1)
    throw PartitionError("attribute blocks do not cover the schema");
  const auto& last = part.attr_groups.back();
  if (std::find(last.begin(), last.end(), rel.class_attr) == last.end())
    throw PartitionError("class attribute must be in the last vertical block");
  std::set<std::string> ids;
  for (const auto& g : part.tuple_groups)
    for (const auto& id : g)
      if (!ids.insert(id).second) throw PartitionError("tuple '" + id + "' in two blocks");
  if (ids.size() != rel.size()) throw PartitionError("tuple blocks do not cover the relation");
  const std::size_t idc = rel.id_column();
  for (const auto& t : rel.tuples)
    if (!ids.count(t[idc])) throw PartitionError("tuple '" + t[idc] + "' unassigned");
}

nlohmann::json to_json(const GridPartition& part) {
  return nlohmann::json{{"v", part.v},
                        {"h", part.h},
                        {"attr_groups", part.attr_groups},
                        {"tuple_groups", part.tuple_groups},
                        {"seed", part.seed}};
}

GridPartition partition_from_json(const nlohmann::json& j) {
  GridPartition p;
  try {
    p.v = j.at("v").get<std::size_t>();
    p.h = j.at("h").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.attr_groups = j.at("attr_groups").get<std::vector<std::vector<std::string>>>();
    p.tuple_groups = j.at("tuple_groups").get<std::vector<std::vector<std::string>>>();
  } catch (const nlohmann::json::exception& e) {
    throw PartitionError(std::string("malformed partition JSON: ") + e.what());
  }
  if (p.attr_groups.size() != p.v || p.tuple_groups.size() != p.h)
    throw PartitionError("partition JSON block counts do not match v/h");
  return p;
}

bool Fragment::has_class() const {
  return std::find(columns.begin(), columns.end(), class_attr) != columns.end();
}

std::size_t Fragment::column(std::string_view name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw SchemaError("fragment has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<std::string> Fragment::ids() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[0]);
  return out;
}

std::vector<Fragment> make_fragments(const Relation& rel, const GridPartition& part) {
  validate_partition(rel, part);
  const std::size_t idc = rel.id_column();
  std::map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < rel.size(); ++r) row_of[rel.tuples[r][idc]] = r;

  std::vector<Fragment> out;
  for (std::size_t i = 1; i <= part.v; ++i) {
    std::vector<std::size_t> cols{idc};
    for (const auto& a : part.attr_groups[i - 1]) cols.push_back(rel.column(a));
    for (std::size_t j = 1; j <= part.h; ++j) {
      Fragment f;
      f.owner = {i, j};
      f.id_attr = rel.id_attr;
      f.class_attr = rel.class_attr;
      for (auto c : cols) {
        f.columns.push_back(rel.schema[c]);
        f.domains.push_back(rel.domains[c]);
      }
      for (const auto& id : part.tuple_groups[j - 1]) {
        const auto& t = rel.tuples[row_of.at(id)];
        Row row;
        for (auto c : cols) row.push_back(t[c]);
        f.rows.push_back(std::move(row));
      }
      // the key column's domain is the fragment's own ids
      std::vector<std::string> ids = f.ids();
      std::sort(ids.begin(), ids.end());
      f.domains[0] = std::move(ids);
      out.push_back(std::move(f));
    }
  }
  return out;
}

Relation reassemble(const GridPartition& part, const std::vector<Fragment>& fragments) {
  std::map<PartyCoord, const Fragment*> by_coord;
  for (const auto& f : fragments) by_coord[f.owner] = &f;
  for (std::size_t i = 1; i <= part.v; ++i)
    for (std::size_t j = 1; j <= part.h; ++j)
      if (!by_coord.count({i, j}))
        throw IncompleteGrid("missing fragment for P_" + std::to_string(i) + std::to_string(j));
  const Fragment& first = *by_coord.at({1, 1});
  std::vector<std::string> schema{first.id_attr};
  for (std::size_t i = 1; i <= part.v; ++i) {
    const auto& cols = by_coord.at({i, 1})->columns;
    schema.insert(schema.end(), cols.begin() + 1, cols.end());
  }
  std::vector<Row> rows;
  for (std::size_t j = 1; j <= part.h; ++j) {
    std::map<std::string, Row> joined;
    for (std::size_t i = 1; i <= part.v; ++i) {
      const Fragment& f = *by_coord.at({i, j});
      for (const auto& r : f.rows) {
        auto& dst = joined[r[0]];
        if (dst.empty()) dst.push_back(r[0]);
        dst.insert(dst.end(), r.begin() + 1, r.end());
      }
    }
    for (auto& [id, row] : joined) {
      if (row.size() != schema.size())
        throw IncompleteGrid("tuple '" + id + "' is not present in every fragment of its block");
      rows.push_back(std::move(row));
    }
  }
  return Relation::make(std::move(schema), first.id_attr, first.class_attr, std::move(rows));
}

Fragment read_fragment_csv(std::istream& in, PartyCoord owner, const std::string& id_attr,
                           const std::string& class_attr) {
  std::string line;
  if (!read_record(in, line)) throw EmptyInput("fragment has no header row");
  Fragment f;
  f.owner = owner;
  f.id_attr = id_attr;
  f.class_attr = class_attr;
  f.columns = split_csv_line(line);
  if (f.columns.empty() || f.columns[0] != id_attr)
    throw SchemaError("fragment must start with the key column '" + id_attr + "'");
  while (read_record(in, line)) {
    auto fields = split_csv_line(line);
    if (fields.size() != f.columns.size()) throw SchemaError("fragment row width mismatch");
    f.rows.push_back(std::move(fields));
  }
  f.domains = infer_domains(f.columns.size(), f.rows);
  return f;
}

void write_fragment_csv(std::ostream& out, const Fragment& frag) {
  write_relation_csv(out, frag.columns, frag.rows);
}

void harmonize_domains(std::vector<Fragment>& fragments) {
  std::map<std::size_t, std::vector<std::set<std::string>>> merged;
  for (const auto& f : fragments) {
    auto& m = merged[f.owner.i];
    if (m.empty()) m.resize(f.columns.size());
    if (m.size() != f.columns.size()) throw SchemaError("fragments of one vertical group differ in width");
    for (std::size_t c = 1; c < f.columns.size(); ++c) m[c].insert(f.domains[c].begin(), f.domains[c].end());
  }
  for (auto& f : fragments) {
    const auto& m = merged.at(f.owner.i);
    for (std::size_t c = 1; c < f.columns.size(); ++c) f.domains[c].assign(m[c].begin(), m[c].end());
  }
}

std::vector<std::vector<std::size_t>> attribute_ranks(const GridPartition& part) {
  std::vector<std::vector<std::size_t>> out;
  std::size_t next = 1;
  for (const auto& g : part.attr_groups) {
    out.emplace_back();
    for (std::size_t k = 0; k < g.size(); ++k) out.back().push_back(next++);
  }
  return out;
}

namespace {

struct Planted {
  std::size_t attr = 0;  // 0 marks a leaf
  std::size_t label = 0;
  std::vector<Planted> children;
};

Planted plant(Rng& rng, const std::vector<std::size_t>& arity, std::vector<bool>& used,
              std::size_t depth, std::size_t classes) {
  Planted n;
  std::vector<std::size_t> free;
  for (std::size_t a = 0; a < arity.size(); ++a)
    if (!used[a]) free.push_back(a);
  if (depth == 0 || free.empty() || (depth < 3 && rng.below(5) == 0)) {
    n.label = rng.below(classes);
    return n;
  }
  const std::size_t a = free[rng.below(free.size())];
  n.attr = a + 1;
  used[a] = true;
  for (std::size_t k = 0; k < arity[a]; ++k) n.children.push_back(plant(rng, arity, used, depth - 1, classes));
  used[a] = false;
  return n;
}

}  // namespace

Relation synthetic_relation(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.attributes < 1 || spec.max_values < 2 || spec.classes < 2 || spec.tuples < 1)
    throw SchemaError("synthetic relation needs >= 1 attribute, >= 2 values, >= 2 classes, >= 1 tuple");
  Rng rng{seed, 0x5717};
  std::vector<std::size_t> arity(spec.attributes);
  for (auto& n : arity) n = 2 + rng.below(spec.max_values - 1);
  std::vector<bool> used(spec.attributes, false);
  const Planted root = plant(rng, arity, used, spec.planted_depth, spec.classes);

  std::vector<std::string> schema{"id"};
  for (std::size_t a = 1; a <= spec.attributes; ++a) schema.push_back("a" + std::to_string(a));
  schema.push_back("class");
  const auto noise_cut = static_cast<std::uint64_t>(spec.noise * 1e6);
  std::vector<Row> rows;
  for (std::size_t t = 0; t < spec.tuples; ++t) {
    char id[16];
    std::snprintf(id, sizeof id, "t%04zu", t + 1);
    Row row{id};
    std::vector<std::size_t> vals(spec.attributes);
    for (std::size_t a = 0; a < spec.attributes; ++a) {
      vals[a] = rng.below(arity[a]);
      row.push_back("v" + std::to_string(vals[a]));
    }
    const Planted* n = &root;
    while (n->attr) n = &n->children[vals[n->attr - 1]];
    std::size_t label = n->label;
    if (rng.below(1000000) < noise_cut) label = rng.below(spec.classes);
    row.push_back("c" + std::to_string(label));
    rows.push_back(std::move(row));
  }
  return Relation::make(std::move(schema), "id", "class", std::move(rows));
}

}  // namespace gridtree::data
