#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridtree/dataset.hpp"

namespace gridtree::id3 {

/// Gains closer than this are treated as equal; the lower schema position wins.
inline constexpr double kGainTieEpsilon = 1e-12;

/// Tuple counts per class value, indexed by position in the class domain.
struct ClassHistogram {
  std::vector<std::uint64_t> counts;

  ClassHistogram() = default;
  explicit ClassHistogram(std::vector<std::uint64_t> c) : counts(std::move(c)) {}
  ClassHistogram(std::initializer_list<std::uint64_t> c) : counts(c) {}

  std::uint64_t total() const;
  /// Number of classes with a non-zero count.
  std::size_t distinct() const;
  /// Index of the most frequent class; ties go to the lowest index.
  std::size_t majority() const;
};

/// Base-2 entropy; 0 for an empty histogram.
double entropy(const ClassHistogram& hist);

/// Information gain of splitting `parent` into `children`. Throws
/// HistogramMismatch when the child totals do not add up to the parent total.
double info_gain(const ClassHistogram& parent, std::span<const ClassHistogram> children);

struct Branch;

struct PlainTree {
  enum class Kind { Leaf, Interior };
  Kind kind = Kind::Leaf;
  std::string label;      // leaf class value
  std::string attribute;  // split attribute of an interior node
  std::vector<Branch> children;

  static PlainTree leaf(std::string label);
  bool is_leaf() const { return kind == Kind::Leaf; }
  std::size_t depth() const;
  std::size_t node_count() const;
};

struct Branch {
  std::string value;
  PlainTree child;
};

bool operator==(const PlainTree& a, const PlainTree& b);
bool operator==(const Branch& a, const Branch& b);

nlohmann::json to_json(const PlainTree& tree);
PlainTree plain_tree_from_json(const nlohmann::json& j);
std::string render_text(const PlainTree& tree);

/// Class histogram over the given rows of `rel`.
ClassHistogram histogram(const data::Relation& rel, std::span<const std::size_t> rows);

/// Per-value histograms when `rows` is split on column `col`, in domain order.
std::vector<ClassHistogram> split_histograms(const data::Relation& rel,
                                             std::span<const std::size_t> rows, std::size_t col);

/// Gain of every candidate column at a node.
struct Decision {
  std::vector<std::size_t> candidates;  // schema columns, ascending
  std::vector<double> gains;            // aligned with candidates
  std::size_t chosen = 0;               // index into candidates
  /// best gain minus the best gain among the other candidates; +inf when
  /// only one candidate exists.
  double margin() const;
};

/// Picks the max-gain candidate with the tie rule above.
std::size_t argmax_gain(std::span<const double> gains);

Decision evaluate_split(const data::Relation& rel, std::span<const std::size_t> rows,
                        std::span<const std::size_t> candidates);

/// ID3 over nominal attributes. Every interior node branches over the full
/// domain of its attribute; a value with no tuples becomes a leaf carrying
/// the parent's majority class. `trace`, when given, receives one Decision
/// per interior node in depth-first order.
PlainTree id3_build(const data::Relation& rel, const std::vector<std::string>& attrs,
                    std::vector<Decision>* trace = nullptr);

/// All non-key, non-class attributes of `rel`.
std::vector<std::string> default_attributes(const data::Relation& rel);

std::string classify_plain(const PlainTree& tree, const std::map<std::string, std::string>& tuple);
std::string classify_plain(const PlainTree& tree, const std::vector<std::string>& schema,
                           const data::Row& row);

}  // namespace gridtree::id3
