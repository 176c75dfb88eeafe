#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gridtree/costmodel.hpp"
#include "gridtree/errors.hpp"
#include "gridtree/id3.hpp"
#include "gridtree/protocols.hpp"
#include "gridtree/verify.hpp"

namespace py = pybind11;
using namespace gridtree;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

struct Partitioned {
  data::Relation rel;
  data::GridPartition part;
  std::vector<data::Fragment> fragments;
};

proto::ProtocolConfig config(std::uint64_t seed, unsigned key_bits, unsigned taylor_terms, unsigned fixed_point_bits) {
  proto::ProtocolConfig cfg;
  cfg.seed = seed;
  cfg.key_bits = key_bits;
  cfg.taylor_terms = taylor_terms;
  cfg.fixed_point_bits = fixed_point_bits;
  return cfg;
}

py::dict counters(const proto::RunResult& r) {
  const auto c = net::snapshot_counters(r.transcript);
  py::dict d;
  d["messages"] = c.messages;
  d["bytes"] = c.bytes;
  d["cipher_ops"] = c.cipher_ops;
  d["circuit_units"] = c.circuit_units;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gridtree, m) {
  m.doc() = "ID3 over grid-partitioned data with secure multiparty primitives";

  // messages carry the error kind, e.g. "ConfigError: ..."
  static PyObject* base = py::register_exception<Error>(m, "Error").ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(base, (e.kind() + ": " + e.what()).c_str());
    }
  });

  py::class_<data::Relation>(m, "Relation")
      .def_readonly("schema", &data::Relation::schema)
      .def_readonly("id_attr", &data::Relation::id_attr)
      .def_readonly("class_attr", &data::Relation::class_attr)
      .def_readonly("tuples", &data::Relation::tuples)
      .def("__len__", &data::Relation::size);

  m.def("load_relation", &data::load_relation, py::arg("path"), py::arg("id_attr"), py::arg("class_attr"));
  m.def(
      "parse_relation",
      [](const std::string& csv, const std::string& id_attr, const std::string& class_attr) {
        std::istringstream in(csv);
        return data::parse_relation_csv(in, id_attr, class_attr);
      },
      py::arg("csv"), py::arg("id_attr"), py::arg("class_attr"));
  m.def(
      "synthetic_relation",
      [](std::size_t attributes, std::size_t max_values, std::size_t classes, std::size_t tuples,
         std::size_t planted_depth, double noise, std::uint64_t seed) {
        return data::synthetic_relation({attributes, max_values, classes, tuples, planted_depth, noise}, seed);
      },
      py::arg("attributes") = 4, py::arg("max_values") = 3, py::arg("classes") = 2, py::arg("tuples") = 50,
      py::arg("planted_depth") = 3, py::arg("noise") = 0.1, py::arg("seed") = 1);

  py::class_<Partitioned>(m, "Partitioned")
      .def_property_readonly("v", [](const Partitioned& p) { return p.part.v; })
      .def_property_readonly("h", [](const Partitioned& p) { return p.part.h; })
      .def("to_dict", [](const Partitioned& p) { return to_py(data::to_json(p.part)); })
      .def("reassemble", [](const Partitioned& p) { return data::reassemble(p.part, p.fragments); });

  m.def(
      "partition",
      [](const data::Relation& rel, std::size_t v, std::size_t h, std::uint64_t seed) {
        auto part = data::make_partition(rel, v, h, seed);
        auto frags = data::make_fragments(rel, part);
        return Partitioned{rel, std::move(part), std::move(frags)};
      },
      py::arg("relation"), py::arg("v"), py::arg("h"), py::arg("seed") = 1);

  py::class_<id3::PlainTree>(m, "PlainTree")
      .def("to_dict", [](const id3::PlainTree& t) { return to_py(id3::to_json(t)); })
      .def("render", &id3::render_text)
      .def_property_readonly("depth", &id3::PlainTree::depth)
      .def("__eq__", [](const id3::PlainTree& a, const id3::PlainTree& b) { return a == b; });

  m.def(
      "id3",
      [](const data::Relation& rel) { return id3::id3_build(rel, id3::default_attributes(rel)); },
      py::arg("relation"));
  m.def(
      "classify",
      [](const id3::PlainTree& t, const std::map<std::string, std::string>& tuple) {
        return id3::classify_plain(t, tuple);
      },
      py::arg("tree"), py::arg("tuple"));

  py::class_<proto::RunResult>(m, "RunResult")
      .def_property_readonly("counters", &counters)
      .def_property_readonly("depth", [](const proto::RunResult& r) { return r.tree.depth(); })
      .def("skeleton", [](const proto::RunResult& r) { return to_py(proto::skeleton_to_json(r.tree)); })
      .def(
          "plaintext", [](const proto::RunResult& r, bool test_mode) { return proto::render_plaintext(r.tree, test_mode); },
          py::arg("test_mode") = false)
      .def(
          "classify",
          [](const proto::RunResult& r, std::size_t layer, const std::vector<std::map<std::string, std::string>>& parts) {
            const auto c = proto::classify_distributed(r.tree, layer, parts);
            return py::make_tuple(c.label, c.hops);
          },
          py::arg("layer"), py::arg("parts"));

  m.def(
      "run",
      [](const std::string& strategy, const Partitioned& p, std::uint64_t seed, unsigned key_bits,
         unsigned taylor_terms, unsigned fixed_point_bits) {
        py::gil_scoped_release release;
        return proto::run_strategy(proto::strategy_from_string(strategy), p.part, p.fragments,
                                   config(seed, key_bits, taylor_terms, fixed_point_bits));
      },
      py::arg("strategy"), py::arg("partitioned"), py::arg("seed") = 1, py::arg("key_bits") = 128,
      py::arg("taylor_terms") = 10, py::arg("fixed_point_bits") = 32);

  m.def(
      "split_tuple",
      [](const Partitioned& p, const data::Row& row) { return proto::split_tuple(p.rel, p.part, row); },
      py::arg("partitioned"), py::arg("row"));

  m.def(
      "verify",
      [](const data::Relation& rel, const id3::PlainTree& t) { return to_py(verify::verify_tree(rel, t).to_json()); },
      py::arg("relation"), py::arg("tree"));
  m.def(
      "audit",
      [](const proto::RunResult& r, const Partitioned& p) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& f : verify::audit_visibility(r.tree, p.fragments)) out.emplace_back(f.party.str(), f.what);
        return out;
      },
      py::arg("result"), py::arg("partitioned"));

  m.def(
      "predict",
      [](const std::string& strategy, const py::dict& params) {
        auto j = from_py(params);
        cost::CostParams p;
        for (auto [key, field] : {std::pair{"h", &p.h}, {"v", &p.v}, {"T", &p.T}, {"R", &p.R}, {"d", &p.d},
                                  {"m", &p.m}, {"t", &p.t}, {"n", &p.n}})
          if (j.contains(key)) *field = j[key].get<std::uint64_t>();
        const auto s = proto::strategy_from_string(strategy);
        if (s == proto::Strategy::Horizontal) throw ConfigError("no cost model for the horizontal protocol");
        const auto pr = s == proto::Strategy::GridHMerge ? cost::predict_hmerge(p) : cost::predict_vmerge(p);
        py::dict d;
        d["computation"] = pr.computation;
        d["communication"] = pr.communication;
        return d;
      },
      py::arg("strategy"), py::arg("params"));

  m.def(
      "sweep",
      [](const data::Relation& rel, std::vector<std::size_t> h_values, std::vector<std::size_t> v_values,
         std::uint64_t seed) {
        cost::SweepPlan plan;
        plan.h_values = std::move(h_values);
        plan.v_values = std::move(v_values);
        nlohmann::json rep;
        {
          py::gil_scoped_release release;
          rep = cost::run_sweep(rel, plan, config(seed, 128, 10, 32));
        }
        return to_py(rep);
      },
      py::arg("relation"), py::arg("h_values") = std::vector<std::size_t>{2, 3, 4, 5},
      py::arg("v_values") = std::vector<std::size_t>{2, 3, 4, 5}, py::arg("seed") = 1);
}
