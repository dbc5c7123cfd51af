// hqs: command-line front end for the quorum-system toolkit.
// Exit codes: 0 pass, 1 property fail, 2 input error.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hqs/graph.hpp"
#include "hqs/io.hpp"
#include "hqs/props.hpp"
#include "hqs/scenario.hpp"

using namespace hqs;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

struct Common {
    std::string system;
    std::string attack;  // overrides the file's byzantine set when given
    bool attack_given = false;
    std::string format = "json";
};

SystemFile load(const Common& c) {
    SystemFile f = load_system(c.system);
    if (c.attack_given) f.attack = Attack::make(f.attack.universe, parse_id_list(c.attack, f.labels));
    return f;
}

void emit(const json& j, const std::string& format, const std::string& text) {
    if (format == "text") std::cout << text;
    else std::cout << j.dump(2) << "\n";
}

// ------------------------------------------------------------------- check

struct CheckOpts {
    bool consistency = false, availability = false, inclusion = false, sharing = false;
    std::optional<std::string> outlived, at, for_p;
};

int cmd_check(const Common& c, const CheckOpts& o) {
    SystemFile f = load(c);
    const ProcSet W = f.attack.well_behaved();
    auto set_or = [&](const std::optional<std::string>& s, ProcSet dflt) {
        return s ? parse_id_list(*s, f.labels) : dflt;
    };
    const ProcSet at = set_or(o.at, W);
    const ProcSet for_p = set_or(o.for_p, W & f.system.active());

    std::vector<PropertyReport> reports;
    bool none = !o.consistency && !o.availability && !o.inclusion && !o.sharing && !o.outlived;
    if (o.consistency || none) reports.push_back(check_consistency(f.system, f.attack, at));
    if (o.availability) reports.push_back(check_availability(f.system, for_p, at));
    if (o.inclusion) reports.push_back(check_quorum_inclusion(f.system, f.attack, for_p));
    if (o.sharing) reports.push_back(check_quorum_sharing(f.system));
    if (o.outlived) reports.push_back(check_outlived(f.system, f.attack, parse_id_list(*o.outlived, f.labels)));

    bool holds = true;
    json out = {{"system", c.system}, {"reports", json::array()}};
    std::string text;
    for (const PropertyReport& r : reports) {
        holds = holds && r.holds;
        out["reports"].push_back(report_to_json(r, f.labels));
        text += r.describe() + "\n";
    }
    out["holds"] = holds;
    emit(out, c.format, text);
    return holds ? kPass : kFail;
}

// ------------------------------------------------------------------- graph

int cmd_graph(const Common& c) {
    SystemFile f = load(c);
    if (c.format == "dot") {
        std::cout << to_dot(f.system, f.attack, DotOptions{f.labels.names()});
        return kPass;
    }
    QuorumGraph g = build_graph(f.system);
    Condensation cond = condense(g);
    std::vector<ProcSet> sinks = sink_components(cond);
    json j;
    j["vertices"] = set_to_json(g.vertices, f.labels);
    j["edges"] = json::array();
    for (auto [a, b] : g.edges()) j["edges"].push_back({f.labels.external(a), f.labels.external(b)});
    j["components"] = json::array();
    for (ProcSet s : cond.components) j["components"].push_back(set_to_json(s, f.labels));
    j["sinks"] = json::array();
    for (ProcSet s : sinks) j["sinks"].push_back(set_to_json(s, f.labels));
    j["unique_sink"] = sinks.size() == 1;
    j["well_behaved_sink_members"] = set_to_json(well_behaved_sink_members(f.system, f.attack), f.labels);

    std::string text;
    for (ProcSet s : sinks) text += "sink " + s.str() + "\n";
    if (sinks.size() > 1) text += "warning: " + std::to_string(sinks.size()) + " sink components\n";
    text += "well-behaved sink members " + well_behaved_sink_members(f.system, f.attack).str() + "\n";
    emit(j, c.format, text);
    return kPass;
}

// --------------------------------------------------------------- enumerate

// Minimal sets of at most k processes that intersect every quorum of p.
std::vector<ProcSet> minimal_blocking(const QuorumSet& Q, ProcSet universe, int k) {
    std::vector<ProcSet> out;
    const std::vector<ProcessId> u = universe.members();
    // Combinations in order of increasing size, so supersets of hits are skipped.
    std::function<void(std::size_t, ProcSet, int)> grow = [&](std::size_t from, ProcSet s, int left) {
        if (left == 0) {
            if (std::none_of(out.begin(), out.end(), [s](ProcSet b) { return b.subset_of(s); }) && blocks(Q, s))
                out.push_back(s);
            return;
        }
        for (std::size_t i = from; i < u.size(); ++i) {
            ProcSet t = s;
            t.insert(u[i]);
            grow(i + 1, t, left - 1);
        }
    };
    for (int size = 1; size <= k; ++size) grow(0, ProcSet{}, size);
    std::sort(out.begin(), out.end(), CanonicalLess{});
    return out;
}

int cmd_enumerate(const Common& c, int k) {
    SystemFile f = load(c);
    json j;
    j["minimal_quorums"] = quorums_to_json(minimal_quorums(f.system, f.attack), f.labels);
    j["blocking"] = json::object();
    std::string text = "minimal quorums " + quorums_str(minimal_quorums(f.system, f.attack)) + "\n";
    for (ProcessId p : f.attack.well_behaved() & f.system.active()) {
        auto sets = minimal_blocking(f.system.quorums(p), f.system.universe(), k);
        json arr = json::array();
        for (ProcSet s : sets) arr.push_back(set_to_json(s, f.labels));
        j["blocking"][f.labels.name(p)] = arr;
        text += "blocking " + std::to_string(p) + ":";
        for (ProcSet s : sets) text += " " + s.str();
        text += "\n";
    }
    json outl = json::array();
    text += "maximal outlived";
    for (ProcSet s : maximal_outlived_sets(f.system, f.attack)) {
        outl.push_back(set_to_json(s, f.labels));
        text += " " + s.str();
    }
    text += "\n";
    j["maximal_outlived_sets"] = outl;
    emit(j, c.format, text);
    return kPass;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& path, std::optional<std::uint64_t> seed, const std::string& trace_path,
                 const std::string& format) {
    Scenario sc = load_scenario(path);
    if (seed) sc.policy.seed = *seed;
    sc.record_trace = !trace_path.empty();
    ScenarioRun run = run_scenario(sc);
    if (!trace_path.empty()) {
        if (trace_path == "-") {
            std::cout << run.result.trace_text();
        } else {
            std::ofstream out(trace_path);
            if (!out) throw Error(ErrorCode::InputError, "cannot write " + trace_path);
            out << run.result.trace_text();
        }
    }
    if (trace_path != "-") {
        std::string text = sc.name + ": " + (run.pass() ? "PASS" : "FAIL") + " (" +
                           outcome_name(run.result.outcome) + ", " + std::to_string(run.result.steps) + " steps)\n";
        for (const Violation& v : run.result.violations)
            text += "  step " + std::to_string(v.step) + " " + v.probe + ": " + v.witness + "\n";
        emit(run.verdict, format, text);
    }
    return run.pass() ? kPass : kFail;
}

// ------------------------------------------------------------------- regen

int cmd_regen(const std::string& fixtures, const std::string& scenarios, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<fs::path> files;
    for (auto& e : fs::directory_iterator(fixtures))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& p : files) {
        SystemFile f = load_system(p.string());
        const ProcSet W = f.attack.well_behaved();
        json j;
        j["system"] = system_to_json(f.system, f.attack, f.labels);
        j["minimal_quorums"] = quorums_to_json(minimal_quorums(f.system, f.attack), f.labels);
        j["consistency"] = report_to_json(check_consistency(f.system, f.attack, W), f.labels);
        j["sharing"] = report_to_json(check_quorum_sharing(f.system), f.labels);
        j["sinks"] = json::array();
        for (ProcSet s : sink_components(condense(build_graph(f.system))))
            j["sinks"].push_back(set_to_json(s, f.labels));
        json outl = json::array();
        for (ProcSet s : maximal_outlived_sets(f.system, f.attack)) outl.push_back(set_to_json(s, f.labels));
        j["maximal_outlived_sets"] = outl;
        std::ofstream(fs::path(out_dir) / (p.stem().string() + ".report.json")) << j.dump(2) << "\n";
    }
    files.clear();
    for (auto& e : fs::directory_iterator(scenarios))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& p : files) {
        Scenario sc = load_scenario(p.string());
        sc.record_trace = false;
        ScenarioRun run = run_scenario(sc);
        std::ofstream(fs::path(out_dir) / (p.stem().string() + ".verdict.json")) << run.verdict.dump(2) << "\n";
    }
    std::cerr << "wrote results to " << out_dir << "\n";
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heterogeneous quorum system toolkit"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, const std::vector<std::string>& formats) {
        sub->add_option("--system", common.system, "Quorum system JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option_function<std::string>(
            "--attack",
            [&](const std::string& s) {
                common.attack = s;
                common.attack_given = true;
            },
            "Byzantine ids, e.g. 4,5 (overrides the file)");
        sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember(formats));
    };

    CheckOpts copts;
    auto* check = app.add_subcommand("check", "Evaluate quorum-system properties");
    add_common(check, {"json", "text"});
    check->add_flag("--consistency", copts.consistency, "Consistency at --at (default: well-behaved)");
    check->add_flag("--availability", copts.availability, "Availability for --for at --at");
    check->add_flag("--inclusion", copts.inclusion, "Quorum inclusion for --for");
    check->add_flag("--sharing", copts.sharing, "Quorum sharing");
    check->add_option_function<std::string>("--outlived", [&](const std::string& s) { copts.outlived = s; },
                                            "Check that the given set is outlived");
    check->add_option_function<std::string>("--at", [&](const std::string& s) { copts.at = s; }, "Set P for 'at P'");
    check->add_option_function<std::string>("--for", [&](const std::string& s) { copts.for_p = s; },
                                            "Set P for 'for P'");

    auto* graph = app.add_subcommand("graph", "Quorum graph, sink components, DOT export");
    add_common(graph, {"json", "dot", "text"});

    int k = 2;
    auto* enumerate = app.add_subcommand("enumerate", "Minimal quorums, blocking sets, maximal outlived sets");
    add_common(enumerate, {"json", "text"});
    enumerate->add_option("--blocking-k", k, "Largest blocking set size to list")->check(CLI::NonNegativeNumber);

    std::string scenario, trace_path, sim_format = "json";
    std::optional<std::uint64_t> seed;
    auto* simulate = app.add_subcommand("simulate", "Run a scenario in the simulator");
    simulate->add_option("--scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    simulate->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { seed = s; }, "Override seed");
    simulate->add_option("--trace", trace_path, "Write the JSON-lines trace to a file ('-' for stdout)");
    simulate->add_option("--format", sim_format, "Verdict format")->check(CLI::IsMember({"json", "text"}));

    std::string fixtures = "fixtures", scenarios = "scenarios", out_dir = "results";
    auto* regen = app.add_subcommand("regen", "Recompute reports for every fixture and scenario");
    regen->add_option("--fixtures", fixtures)->check(CLI::ExistingDirectory);
    regen->add_option("--scenarios", scenarios)->check(CLI::ExistingDirectory);
    regen->add_option("--out", out_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kPass : kInputError;
    }

    try {
        if (*check) return cmd_check(common, copts);
        if (*graph) return cmd_graph(common);
        if (*enumerate) return cmd_enumerate(common, k);
        if (*simulate) return cmd_simulate(scenario, seed, trace_path, sim_format);
        if (*regen) return cmd_regen(fixtures, scenarios, out_dir);
    } catch (const Error& e) {
        std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
