// Python bindings. Sets and systems cross the boundary as JSON text; the
// hqs package wraps that in plain Python values.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hqs/graph.hpp"
#include "hqs/io.hpp"
#include "hqs/scenario.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace hqs {
namespace {

struct PySystem {
    SystemFile f;

    ProcSet set(const std::string& text, const std::string& field) const {
        return set_from_json(json::parse(text), f.labels, field);
    }
    std::string report(const PropertyReport& r) const { return report_to_json(r, f.labels).dump(); }
    std::string sets(const std::vector<ProcSet>& v) const {
        json out = json::array();
        for (ProcSet s : v) out.push_back(set_to_json(s, f.labels));
        return out.dump();
    }
};

PySystem from_text(const std::string& text) { return PySystem{parse_system(json::parse(text))}; }

std::string simulate(const std::string& text, const std::string& base_dir, std::optional<std::uint64_t> seed) {
    Scenario sc = parse_scenario(json::parse(text), base_dir);
    if (seed) sc.policy.seed = *seed;
    auto run = run_scenario(sc);
    json out = run.verdict;
    out["trace"] = json::array();
    for (auto& line : run.result.trace) out["trace"].push_back(json::parse(line));
    return out.dump();
}

}  // namespace
}  // namespace hqs

PYBIND11_MODULE(_hqs, m) {
    using namespace hqs;
    py::register_exception<Error>(m, "HqsError", PyExc_ValueError);
    py::register_exception<json::exception>(m, "JsonError", PyExc_ValueError);

    py::class_<PySystem>(m, "System")
        .def_static("from_json", &from_text)
        .def_static("load", [](const std::string& path) { return PySystem{load_system(path)}; })
        .def("to_json", [](const PySystem& s) { return system_to_json(s.f.system, s.f.attack, s.f.labels).dump(); })
        .def("well_behaved", [](const PySystem& s) { return set_to_json(s.f.attack.well_behaved(), s.f.labels).dump(); })
        .def("consistency", [](const PySystem& s, const std::string& at) {
            return s.report(check_consistency(s.f.system, s.f.attack, s.set(at, "at")));
        })
        .def("availability", [](const PySystem& s, const std::string& for_P, const std::string& at) {
            return s.report(check_availability(s.f.system, s.set(for_P, "for"), s.set(at, "at")));
        })
        .def("inclusion", [](const PySystem& s, const std::string& P) {
            return s.report(check_quorum_inclusion(s.f.system, s.f.attack, s.set(P, "for")));
        })
        .def("sharing", [](const PySystem& s) { return s.report(check_quorum_sharing(s.f.system)); })
        .def("outlived", [](const PySystem& s, const std::string& O) {
            return s.report(check_outlived(s.f.system, s.f.attack, s.set(O, "outlived")));
        })
        .def("minimal_quorums", [](const PySystem& s) { return s.sets(minimal_quorums(s.f.system, s.f.attack)); })
        .def("maximal_outlived", [](const PySystem& s) { return s.sets(maximal_outlived_sets(s.f.system, s.f.attack)); })
        .def("sinks", [](const PySystem& s) { return s.sets(sink_components(condense(build_graph(s.f.system)))); })
        .def("dot", [](const PySystem& s) { return to_dot(s.f.system, s.f.attack, {s.f.labels.names()}); });

    m.def("simulate", &simulate, py::arg("scenario"), py::arg("base_dir") = ".", py::arg("seed") = py::none());
    m.def("probe_names", &probe_names);
}
