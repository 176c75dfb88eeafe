#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridtree/costmodel.hpp"
#include "gridtree/dataset.hpp"
#include "gridtree/errors.hpp"
#include "gridtree/id3.hpp"
#include "gridtree/protocols.hpp"
#include "gridtree/verify.hpp"

namespace fs = std::filesystem;
using namespace gridtree;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kConfig = 2, kProtocol = 3, kAnalysis = 4 };

struct Options {
  std::string input;
  std::string id_col = "id";
  std::string class_col = "class";
  std::size_t v = 1;
  std::size_t h = 3;
  std::string strategy = "grid-hmerge";
  std::optional<std::uint64_t> seed;
  unsigned key_bits = 128;
  unsigned taylor_terms = 10;
  unsigned fixed_point_bits = 32;
  std::string out = "out";
  // report
  std::vector<std::size_t> sweep_h{2, 3, 4, 5};
  std::vector<std::size_t> sweep_v{2, 3, 4, 5};
  std::size_t tuples = 0;
  std::size_t attributes = 0;
  std::size_t max_values = 0;
};

std::uint64_t resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("GRIDTREE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("GRIDTREE_SEED is not a number: ") + env);
    }
  }
  return 1;
}

proto::ProtocolConfig protocol_config(const Options& o) {
  proto::ProtocolConfig c;
  c.seed = resolve_seed(o);
  c.key_bits = o.key_bits;
  c.taylor_terms = o.taylor_terms;
  c.fixed_point_bits = o.fixed_point_bits;
  return c;
}

std::string party_name(std::size_t i, std::size_t j) {
  return net::PartyId{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)}.str();
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << text;
}

json read_json(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw ConfigError("missing " + p.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw SchemaError(p.string() + ": " + e.what());
  }
}

struct Workspace {
  std::string id_col, class_col;
  data::GridPartition part;
  std::vector<data::Fragment> fragments;
};

Workspace load_workspace(const fs::path& out) {
  const json meta = read_json(out / "partition.json");
  Workspace w;
  try {
    w.id_col = meta.at("id_col").get<std::string>();
    w.class_col = meta.at("class_col").get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("partition.json: ") + e.what());
  }
  w.part = data::partition_from_json(meta.at("partition"));
  for (std::size_t i = 1; i <= w.part.v; ++i)
    for (std::size_t j = 1; j <= w.part.h; ++j) {
      const auto p = out / "fragments" / (party_name(i, j) + ".csv");
      std::ifstream f(p);
      if (!f) throw IncompleteGrid("missing fragment " + p.string());
      w.fragments.push_back(data::read_fragment_csv(f, {i, j}, w.id_col, w.class_col));
    }
  return w;
}

int cmd_partition(const Options& o) {
  if (o.input.empty()) throw ConfigError("--input is required");
  const auto rel = data::load_relation(o.input, o.id_col, o.class_col);
  const auto part = data::make_partition(rel, o.v, o.h, resolve_seed(o));
  const auto frags = data::make_fragments(rel, part);
  const fs::path out = o.out;
  write_text(out / "partition.json",
             json{{"id_col", o.id_col}, {"class_col", o.class_col}, {"partition", data::to_json(part)}}.dump(2) + "\n");
  for (const auto& f : frags) {
    std::ostringstream os;
    data::write_fragment_csv(os, f);
    write_text(out / "fragments" / (party_name(f.owner.i, f.owner.j) + ".csv"), os.str());
  }
  std::cout << "wrote " << frags.size() << " fragments (v=" << part.v << ", h=" << part.h << ") to " << out.string()
            << "\n";
  return kOk;
}

int cmd_run(const Options& o) {
  const fs::path out = o.out;
  const Workspace w = load_workspace(out);
  const auto strategy = proto::strategy_from_string(o.strategy);
  const auto cfg = protocol_config(o);
  const auto run = proto::run_strategy(strategy, w.part, w.fragments, cfg);

  write_text(out / "tree" / "skeleton.json", proto::skeleton_to_json(run.tree).dump(2) + "\n");
  for (std::size_t i = 1; i <= w.part.v; ++i)
    for (std::size_t j = 1; j <= w.part.h; ++j) {
      const net::PartyId p{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
      write_text(out / "tree" / ("payload_" + party_name(i, j) + ".json"),
                 proto::payload_to_json(run.tree, p).dump(2) + "\n");
    }
  write_text(out / "transcript.jsonl", run.transcript.to_jsonl());

  const auto rel = data::reassemble(w.part, w.fragments);
  const auto params = cost::CostParams::of(rel, w.part, cfg.key_bits, cfg.taylor_terms);
  json report{{"strategy", o.strategy},
              {"seed", cfg.seed},
              {"config",
               {{"key_bits", cfg.key_bits}, {"taylor_terms", cfg.taylor_terms}, {"fixed_point_bits", cfg.fixed_point_bits}}},
              {"params", cost::to_json(params)},
              {"measured", net::to_json(net::snapshot_counters(run.transcript))},
              {"tree", {{"nodes", run.tree.nodes.size()}, {"depth", run.tree.depth()}}}};
  if (strategy == proto::Strategy::GridHMerge || strategy == proto::Strategy::GridVMerge) {
    const auto pr = strategy == proto::Strategy::GridHMerge ? cost::predict_hmerge(params) : cost::predict_vmerge(params);
    report["predicted"] = {{"computation", pr.computation}, {"communication", pr.communication}};
  }
  write_text(out / "report.json", report.dump(2) + "\n");
  std::cout << o.strategy << ": " << run.tree.nodes.size() << " nodes, " << report["measured"]["messages"] << " messages, "
            << report["measured"]["bytes"] << " bytes\n";
  return kOk;
}

int cmd_verify(const Options& o) {
  const fs::path out = o.out;
  const Workspace w = load_workspace(out);
  const json skel = read_json(out / "tree" / "skeleton.json");
  std::vector<json> payloads;
  for (std::size_t i = 1; i <= w.part.v; ++i)
    for (std::size_t j = 1; j <= w.part.h; ++j)
      payloads.push_back(read_json(out / "tree" / ("payload_" + party_name(i, j) + ".json")));
  const auto tree = proto::tree_from_json(skel, payloads);
  const auto rel = data::reassemble(w.part, w.fragments);

  verify::VerifyReport rep;
  try {
    rep = verify::verify_tree(rel, proto::render_plaintext(tree, true));
  } catch (const DanglingNode& e) {
    rep.diffs.push_back(e.what());
  }
  const auto findings = verify::audit_visibility(tree, w.fragments);
  json audit = json::array();
  for (const auto& f : findings) audit.push_back({{"party", f.party.str()}, {"finding", f.what}});
  const bool pass = rep.diffs.empty() && findings.empty();
  json j = rep.to_json();
  j["pass"] = pass;
  j["audit"] = audit;
  write_text(out / "verify.json", j.dump(2) + "\n");

  if (pass)
    std::cout << (rep.notes.empty() ? "PASS" : "PASS with margin notes") << "\n";
  else
    std::cout << "FAIL\n";
  for (const auto& n : rep.notes) std::cout << "  note: " << n << "\n";
  for (const auto& d : rep.diffs) std::cout << "  diff: " << d << "\n";
  for (const auto& f : findings) std::cout << "  audit: " << f.party.str() << ": " << f.what << "\n";
  return pass ? kOk : kAnalysis;
}

int cmd_report(const Options& o) {
  const auto cfg = protocol_config(o);
  data::Relation rel;
  if (!o.input.empty()) {
    rel = data::load_relation(o.input, o.id_col, o.class_col);
  } else {
    auto spec = cost::default_sweep_relation();
    if (o.tuples) spec.tuples = o.tuples;
    if (o.attributes) spec.attributes = o.attributes;
    if (o.max_values) spec.max_values = o.max_values;
    rel = data::synthetic_relation(spec, cfg.seed);
  }
  cost::SweepPlan plan;
  plan.h_values = o.sweep_h;
  plan.v_values = o.sweep_v;
  if (o.sweep_h.size() < 4 || o.sweep_v.size() < 4)
    throw FitError("each sweep needs at least 4 points");
  const auto report = cost::run_sweep(rel, plan, cfg);
  write_text(fs::path(o.out) / "report.json", report.dump(2) + "\n");
  std::cout << cost::report_table(report);
  return kOk;
}

int exit_code(const Error& e) {
  const std::string& k = e.kind();
  if (k == "FitError") return kAnalysis;
  if (k == "ProtocolHang" || k == "DomainViolation" || k == "EncodingError" || k == "PaddingOverflow" ||
      k == "SpecError" || k == "DanglingNode")
    return kProtocol;
  return kConfig;
}

// The grid height flag is spelled -h-groups; CLI11 only takes single-dash
// short names, so it is rewritten before parsing.
std::vector<std::string> normalize_args(int argc, char** argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) {
    std::string a = argv[k];
    if (a == "-h-groups" || a.rfind("-h-groups=", 0) == 0) a = "-" + a;
    args.push_back(std::move(a));
  }
  std::reverse(args.begin(), args.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving ID3 over grid-partitioned data"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Output directory")->capture_default_str();
    c->add_option("--seed", o.seed, "Seed (falls back to GRIDTREE_SEED, then 1)");
  };
  auto data_flags = [&](CLI::App* c) {
    c->add_option("--input", o.input, "Relation CSV");
    c->add_option("--id-col", o.id_col, "Key column")->capture_default_str();
    c->add_option("--class-col", o.class_col, "Class column")->capture_default_str();
  };
  auto protocol_flags = [&](CLI::App* c) {
    c->add_option("--key-bits", o.key_bits, "Cipher modulus bits")->capture_default_str();
    c->add_option("--taylor-terms", o.taylor_terms, "Series length for ln")->capture_default_str();
    c->add_option("--fixed-point-bits", o.fixed_point_bits, "Fractional bits")->capture_default_str();
  };

  auto* part = app.add_subcommand("partition", "Split a relation into per-party fragment files");
  data_flags(part);
  common(part);
  part->add_option("-v", o.v, "Vertical groups")->capture_default_str();
  part->add_option("--h-groups", o.h, "Horizontal groups (also -h-groups)")->capture_default_str();

  auto* run = app.add_subcommand("run", "Run a protocol on partitioned fragments");
  common(run);
  protocol_flags(run);
  run->add_option("--strategy", o.strategy, "horizontal, grid-hmerge or grid-vmerge")->capture_default_str();

  auto* ver = app.add_subcommand("verify", "Compare a run's tree against centralized ID3");
  common(ver);

  auto* rep = app.add_subcommand("report", "Sweep grid sizes and fit cost exponents");
  data_flags(rep);
  common(rep);
  protocol_flags(rep);
  rep->add_option("--sweep-h", o.sweep_h, "h values for grid-hmerge (v=2)")->delimiter(',');
  rep->add_option("--sweep-v", o.sweep_v, "v values for grid-vmerge (h=2)")->delimiter(',');
  rep->add_option("--tuples", o.tuples, "Synthetic relation size");
  rep->add_option("--attributes", o.attributes, "Synthetic attribute count");
  rep->add_option("--max-values", o.max_values, "Synthetic values per attribute");

  try {
    auto args = normalize_args(argc, argv);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*part) return cmd_partition(o);
    if (*run) return cmd_run(o);
    if (*ver) return cmd_verify(o);
    return cmd_report(o);
  } catch (const Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
}
