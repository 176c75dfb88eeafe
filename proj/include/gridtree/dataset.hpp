#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace gridtree::data {

using Row = std::vector<std::string>;

/// A relation over nominal attributes with a key column and a class column.
/// `domains[c]` is the sorted set of admissible values of column `c`.
struct Relation {
  std::vector<std::string> schema;
  std::string id_attr;
  std::string class_attr;
  std::vector<Row> tuples;
  std::vector<std::vector<std::string>> domains;

  /// Builds a relation, infers domains from the rows and validates it.
  static Relation make(std::vector<std::string> schema, std::string id_attr,
                       std::string class_attr, std::vector<Row> tuples);

  std::size_t size() const { return tuples.size(); }
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
  std::size_t id_column() const { return column(id_attr); }
  std::size_t class_column() const { return column(class_attr); }
  /// Non-key, non-class columns in schema order.
  std::vector<std::size_t> attribute_columns() const;
  const std::vector<std::string>& domain(std::size_t col) const { return domains.at(col); }

  void validate() const;
};

/// Row-order-insensitive equality that also ignores column order.
bool equivalent(const Relation& a, const Relation& b);

Relation parse_relation_csv(std::istream& in, const std::string& id_attr,
                            const std::string& class_attr);
Relation load_relation(const std::string& path, const std::string& id_attr,
                       const std::string& class_attr);
void write_relation_csv(std::ostream& out, const std::vector<std::string>& header,
                        const std::vector<Row>& rows);

struct PartyCoord {
  std::size_t i = 1;  // vertical group, 1..v
  std::size_t j = 1;  // horizontal group, 1..h
  friend bool operator==(const PartyCoord&, const PartyCoord&) = default;
  friend auto operator<=>(const PartyCoord&, const PartyCoord&) = default;
};

/// Attribute blocks (by name) and tuple blocks (by id). The class attribute
/// always lives in the last attribute block.
struct GridPartition {
  std::size_t v = 1;
  std::size_t h = 1;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> attr_groups;
  std::vector<std::vector<std::string>> tuple_groups;

  std::size_t parties() const { return v * h; }
  bool horizontal() const { return v == 1; }
  bool vertical() const { return h == 1; }
  bool grid() const { return v >= 2 && h >= 2; }
};

GridPartition make_partition(const Relation& rel, std::size_t v, std::size_t h,
                             std::uint64_t seed);
void validate_partition(const Relation& rel, const GridPartition& part);

nlohmann::json to_json(const GridPartition& part);
GridPartition partition_from_json(const nlohmann::json& j);

/// The piece S_ij held by party P_ij: the key column plus the attributes of
/// vertical block i, restricted to the tuples of horizontal block j.
struct Fragment {
  PartyCoord owner;
  std::string id_attr;
  std::string class_attr;  // name of the global class attribute
  std::vector<std::string> columns;  // columns[0] == id_attr
  std::vector<Row> rows;
  /// Admissible values per column (shared schema metadata of the group).
  std::vector<std::vector<std::string>> domains;

  bool has_class() const;
  std::size_t column(std::string_view name) const;
  std::vector<std::string> ids() const;
};

std::vector<Fragment> make_fragments(const Relation& rel, const GridPartition& part);

/// Joins fragments on the key within each horizontal block and unions the
/// blocks. Throws IncompleteGrid when a coordinate is missing.
Relation reassemble(const GridPartition& part, const std::vector<Fragment>& fragments);

/// Reads a fragment CSV written by `write_fragment_csv`; domains are the
/// values present.
Fragment read_fragment_csv(std::istream& in, PartyCoord owner, const std::string& id_attr,
                           const std::string& class_attr);
void write_fragment_csv(std::ostream& out, const Fragment& frag);

/// Gives every fragment of a vertical group the union of the group's value
/// domains, so that all members enumerate branches identically.
void harmonize_domains(std::vector<Fragment>& fragments);

/// Schema position of every attribute in the reassembled relation
/// (key first, then the vertical blocks in order).
std::vector<std::vector<std::size_t>> attribute_ranks(const GridPartition& part);

/// Shape of a synthetic relation. Each attribute gets between 2 and
/// `max_values` values; the class follows a random planted tree over the
/// attributes, with each label replaced by a random one with probability
/// `noise`.
struct SyntheticSpec {
  std::size_t attributes = 4;
  std::size_t max_values = 3;
  std::size_t classes = 2;
  std::size_t tuples = 50;
  std::size_t planted_depth = 3;
  double noise = 0.1;
};

/// Columns "id", "a1".."aN", "class"; ids "t0001"...
Relation synthetic_relation(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace gridtree::data
