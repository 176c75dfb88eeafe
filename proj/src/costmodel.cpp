#include "gridtree/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "gridtree/errors.hpp"

namespace gridtree::cost {

void CostParams::validate() const {
  if (!h || !v || !T || !R || !d || !m || !t || !n) throw ConfigError("cost parameters must all be positive");
}

CostParams CostParams::of(const data::Relation& rel, const data::GridPartition& part, unsigned key_bits,
                          unsigned taylor_terms) {
  CostParams p;
  p.h = part.h;
  p.v = part.v;
  p.T = rel.size();
  const auto attrs = rel.attribute_columns();
  p.R = attrs.size();
  p.d = rel.domain(rel.class_column()).size();
  p.m = 1;
  for (auto c : attrs) p.m = std::max<std::uint64_t>(p.m, rel.domain(c).size());
  p.t = key_bits;
  p.n = taylor_terms;
  return p;
}

nlohmann::json to_json(const CostParams& p) {
  return {{"h", p.h}, {"v", p.v}, {"k", p.k()}, {"T", p.T}, {"R", p.R},
          {"d", p.d}, {"m", p.m}, {"t", p.t},   {"n", p.n}};
}

namespace {

double lg(std::uint64_t x) { return std::log2(static_cast<double>(std::max<std::uint64_t>(x, 2))); }

}  // namespace

Prediction predict_hmerge(const CostParams& p) {
  p.validate();
  const double R = p.R, v = p.v, d = p.d, m = p.m, h = p.h, T = p.T, t = p.t;
  return {R * (v + d + m) * (h * h * T * t * t * t), R * (v + d) * (h * h * T * t)};
}

std::uint64_t vmerge_values_per_attribute(const CostParams& p) { return 1 + p.d + p.m + p.d * p.m; }

Prediction predict_vmerge(const CostParams& p, bool secure_sum_terms) {
  p.validate();
  const double R = p.R, v = p.v, h = p.h, T = p.T, t = p.t, n = p.n;
  const double vals = static_cast<double>(vmerge_values_per_attribute(p));
  const double extra = secure_sum_terms ? h * lg(p.T) : 0.0;
  return {R * (h * vals) * (v * v * T * t * t * t) + R * vals * lg(p.T) + R * lg(p.T) + extra,
          R * (h * vals) * (v * v * T * t) + R * vals * n * (lg(p.T) * t) + R * lg(p.T) * t + extra};
}

double fit_exponent(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw FitError("need at least two paired points to fit");
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] <= 0 || y[k] <= 0) throw FitError("log-log fit needs positive values");
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0) throw FitError("swept parameter takes a single value");
  return sxy / sxx;
}

namespace {

using Field = std::pair<const char*, std::uint64_t CostParams::*>;
constexpr Field kFields[] = {{"h", &CostParams::h}, {"v", &CostParams::v}, {"T", &CostParams::T},
                             {"R", &CostParams::R}, {"d", &CostParams::d}, {"m", &CostParams::m},
                             {"t", &CostParams::t}, {"n", &CostParams::n}};

using Counter = std::pair<const char*, std::uint64_t net::CostCounters::*>;
constexpr Counter kCounters[] = {{"messages", &net::CostCounters::messages},
                                 {"bytes", &net::CostCounters::bytes},
                                 {"cipher_ops", &net::CostCounters::cipher_ops},
                                 {"circuit_units", &net::CostCounters::circuit_units}};

Prediction predict(const std::string& strategy, const CostParams& p) {
  if (strategy == "grid-hmerge") return predict_hmerge(p);
  if (strategy == "grid-vmerge") return predict_vmerge(p);
  throw FitError("no cost model for strategy '" + strategy + "'");
}

nlohmann::json exponent_or_null(const std::vector<double>& x, const std::vector<double>& y) {
  if (std::any_of(y.begin(), y.end(), [](double v) { return v <= 0; })) return nullptr;
  return fit_exponent(x, y);
}

}  // namespace

nlohmann::json fit_and_compare(std::span<const Measurement> measured, std::span<const Measurement> matched_in) {
  std::map<std::string, std::vector<const Measurement*>> groups;
  for (const auto& m : measured) groups[m.strategy].push_back(&m);
  if (groups.empty()) throw FitError("no measurements");

  nlohmann::json out{{"groups", nlohmann::json::array()}};
  for (auto& [strategy, pts] : groups) {
    if (pts.size() < 4)
      throw FitError(strategy + ": " + std::to_string(pts.size()) + " points, at least 4 are needed");
    std::vector<const Field*> swept;
    for (const auto& f : kFields) {
      std::set<std::uint64_t> vals;
      for (const auto* m : pts) vals.insert(m->params.*f.second);
      if (vals.size() > 1) swept.push_back(&f);
    }
    if (swept.size() != 1)
      throw FitError(strategy + ": exactly one parameter must vary, found " + std::to_string(swept.size()));
    const Field& f = *swept.front();
    std::sort(pts.begin(), pts.end(),
              [&](const Measurement* a, const Measurement* b) { return a->params.*f.second < b->params.*f.second; });

    std::vector<double> x, comp, comm;
    nlohmann::json points = nlohmann::json::array();
    for (const auto* m : pts) {
      const auto pr = predict(strategy, m->params);
      x.push_back(static_cast<double>(m->params.*f.second));
      comp.push_back(pr.computation);
      comm.push_back(pr.communication);
      points.push_back({{"params", to_json(m->params)},
                        {"predicted", {{"computation", pr.computation}, {"communication", pr.communication}}},
                        {"measured", net::to_json(m->counters)}});
    }
    nlohmann::json meas;
    for (const auto& c : kCounters) {
      std::vector<double> y;
      for (const auto* m : pts) y.push_back(static_cast<double>(m->counters.*c.second));
      meas[c.first] = exponent_or_null(x, y);
    }
    out["groups"].push_back({{"strategy", strategy},
                             {"swept", f.first},
                             {"points", points},
                             {"exponents",
                              {{"measured", meas},
                               {"predicted", {{"computation", fit_exponent(x, comp)},
                                              {"communication", fit_exponent(x, comm)}}}}}});
  }

  // strategies measured at identical params, compared on bytes
  const auto pool = matched_in.empty() ? measured : matched_in;
  nlohmann::json matched = nlohmann::json::array();
  std::map<std::string, std::size_t> cheaper;
  for (std::size_t a = 0; a < pool.size(); ++a)
    for (std::size_t b = a + 1; b < pool.size(); ++b) {
      const auto& ma = pool[a];
      const auto& mb = pool[b];
      if (ma.strategy == mb.strategy || !(ma.params == mb.params)) continue;
      const auto& win = ma.counters.bytes <= mb.counters.bytes ? ma : mb;
      ++cheaper[win.strategy];
      matched.push_back({{"params", to_json(ma.params)},
                         {ma.strategy, ma.counters.bytes},
                         {mb.strategy, mb.counters.bytes},
                         {"cheaper", win.strategy}});
    }
  nlohmann::json verdict{{"matched", matched}};
  if (!matched.empty()) {
    auto best = std::max_element(cheaper.begin(), cheaper.end(),
                                 [](const auto& l, const auto& r) { return l.second < r.second; });
    verdict["cheaper_on_bytes"] = best->second == matched.size() ? nlohmann::json(best->first) : nlohmann::json("mixed");
  } else {
    verdict["cheaper_on_bytes"] = nullptr;
  }
  out["verdict"] = verdict;
  return out;
}

Measurement measure(proto::Strategy s, const data::Relation& rel, std::size_t v, std::size_t h,
                    const proto::ProtocolConfig& cfg) {
  const auto part = data::make_partition(rel, v, h, cfg.seed);
  const auto frags = data::make_fragments(rel, part);
  const auto run = proto::run_strategy(s, part, frags, cfg);
  return {proto::to_string(s), CostParams::of(rel, part, cfg.key_bits, cfg.taylor_terms),
          net::snapshot_counters(run.transcript)};
}

nlohmann::json run_sweep(const data::Relation& rel, const SweepPlan& plan, const proto::ProtocolConfig& cfg) {
  std::vector<Measurement> sweep, matched;
  for (auto h : plan.h_values) sweep.push_back(measure(proto::Strategy::GridHMerge, rel, plan.hmerge_v, h, cfg));
  for (auto v : plan.v_values) sweep.push_back(measure(proto::Strategy::GridVMerge, rel, v, plan.vmerge_h, cfg));
  for (auto [v, h] : plan.matched) {
    matched.push_back(measure(proto::Strategy::GridHMerge, rel, v, h, cfg));
    matched.push_back(measure(proto::Strategy::GridVMerge, rel, v, h, cfg));
  }
  return fit_and_compare(sweep, matched);
}

data::SyntheticSpec default_sweep_relation() {
  data::SyntheticSpec s;
  s.attributes = 6;
  s.max_values = 2;
  s.classes = 2;
  s.tuples = 60;
  return s;
}

std::string report_table(const nlohmann::json& report) {
  std::ostringstream os;
  char line[256];
  for (const auto& g : report.at("groups")) {
    const std::string swept = g.at("swept");
    os << g.at("strategy").get<std::string>() << " (sweep " << swept << ")\n";
    std::snprintf(line, sizeof line, "  %6s %10s %14s %12s %14s %16s\n", swept.c_str(), "messages", "bytes",
                  "cipher_ops", "circuit_units", "predicted_comm");
    os << line;
    for (const auto& p : g.at("points")) {
      const auto& m = p.at("measured");
      std::snprintf(line, sizeof line, "  %6llu %10llu %14llu %12llu %14llu %16.4g\n",
                    static_cast<unsigned long long>(p.at("params").at(swept).get<std::uint64_t>()),
                    static_cast<unsigned long long>(m.at("messages").get<std::uint64_t>()),
                    static_cast<unsigned long long>(m.at("bytes").get<std::uint64_t>()),
                    static_cast<unsigned long long>(m.at("cipher_ops").get<std::uint64_t>()),
                    static_cast<unsigned long long>(m.at("circuit_units").get<std::uint64_t>()),
                    p.at("predicted").at("communication").get<double>());
      os << line;
    }
    const auto& e = g.at("exponents");
    os << "  exponent: bytes " << e.at("measured").at("bytes").dump() << ", messages "
       << e.at("measured").at("messages").dump() << ", model communication "
       << e.at("predicted").at("communication").get<double>() << "\n";
  }
  const auto& v = report.at("verdict");
  os << "matched configurations: " << v.at("matched").size();
  if (!v.at("cheaper_on_bytes").is_null()) os << ", cheaper on bytes: " << v.at("cheaper_on_bytes").get<std::string>();
  os << "\n";
  return os.str();
}

}  // namespace gridtree::cost
