#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridtree/dataset.hpp"
#include "gridtree/partynet.hpp"
#include "gridtree/protocols.hpp"

namespace gridtree::cost {

/// Parameters of the asymptotic cost expressions. `R` is the number of
/// attributes, `d` the class domain size, `m` the largest attribute domain,
/// `t` the key length in bits and `n` the Taylor length.
struct CostParams {
  std::uint64_t h = 2;
  std::uint64_t v = 2;
  std::uint64_t T = 1;
  std::uint64_t R = 1;
  std::uint64_t d = 2;
  std::uint64_t m = 2;
  std::uint64_t t = 128;
  std::uint64_t n = 10;

  std::uint64_t k() const { return h * v; }
  void validate() const;
  /// Reads h, v, T, R, d, m off a relation and its partition.
  static CostParams of(const data::Relation& rel, const data::GridPartition& part, unsigned key_bits,
                       unsigned taylor_terms);
  friend bool operator==(const CostParams&, const CostParams&) = default;
};

nlohmann::json to_json(const CostParams& p);

struct Prediction {
  double computation = 0;
  double communication = 0;
};

Prediction predict_hmerge(const CostParams& p);
/// `secure_sum_terms` adds the optional h·log|T| terms to both costs.
Prediction predict_vmerge(const CostParams& p, bool secure_sum_terms = true);

/// Values computed per attribute when merging vertically first: 1 + d + m + dm.
std::uint64_t vmerge_values_per_attribute(const CostParams& p);

/// Slope of log(y) against log(x) by least squares.
double fit_exponent(std::span<const double> x, std::span<const double> y);

struct Measurement {
  std::string strategy;
  CostParams params;
  net::CostCounters counters;
};

/// Groups measurements by strategy, finds the single swept parameter of each
/// group and fits measured and predicted exponents. Strategies measured at
/// identical params in `matched` (or in `measured` when `matched` is empty)
/// are compared on bytes. Needs at least four points per group (FitError
/// otherwise).
nlohmann::json fit_and_compare(std::span<const Measurement> measured,
                               std::span<const Measurement> matched = {});

/// Partitions `rel` as v x h with the config seed and runs one strategy.
Measurement measure(proto::Strategy s, const data::Relation& rel, std::size_t v, std::size_t h,
                    const proto::ProtocolConfig& cfg);

/// hmerge swept over h at fixed v, vmerge swept over v at fixed h, and both
/// strategies at each matched grid shape.
struct SweepPlan {
  std::vector<std::size_t> h_values{2, 3, 4, 5};
  std::size_t hmerge_v = 2;
  std::vector<std::size_t> v_values{2, 3, 4, 5};
  std::size_t vmerge_h = 2;
  std::vector<std::pair<std::size_t, std::size_t>> matched{{3, 3}};  // (v, h)
};

nlohmann::json run_sweep(const data::Relation& rel, const SweepPlan& plan, const proto::ProtocolConfig& cfg);

/// The relation the default sweep runs on.
data::SyntheticSpec default_sweep_relation();

/// Fixed-width table of a fit_and_compare report.
std::string report_table(const nlohmann::json& report);

}  // namespace gridtree::cost
