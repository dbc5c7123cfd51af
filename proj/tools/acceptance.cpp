// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include "hqs/brb.hpp"
#include "hqs/discovery.hpp"
#include "hqs/graph.hpp"
#include "hqs/scenario.hpp"
#include "support.hpp"

using namespace hqs;
using namespace hqs::testing;

namespace {

// Pinned sizes. Every check below is exact (set equality or zero violations).
constexpr int kDiscoverySeeds = 100;
constexpr int kGraphSystems = 500;
constexpr int kLeaveSystems = 200;
constexpr int kLeaveSeeds = 100;
constexpr int kAddSeeds = 100;
constexpr int kExhaustiveDepth = 9;      // scripted choices enumerated in full up to this step
constexpr int kExhaustiveBudget = 50000;  // a hard stop; the run reports whether it was hit
constexpr int kSplitSeeds = 100;
constexpr int kBrbSystems = 100;
constexpr std::size_t kMaxViolations = 0;

struct Verdict {
    bool pass = true;
    std::ostringstream note;
    void require(bool ok, const std::string& what) {
        if (!ok && pass) note << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

std::set<IntSet> ints(const QuorumSet& qs) { return as_int_sets(qs); }

ScenarioRun run_file(const std::string& name, std::optional<std::uint64_t> seed = {}) {
    Scenario sc = load_scenario(source_path("scenarios/" + name + ".json"));
    if (seed) sc.policy.seed = *seed;
    return run_scenario(sc);
}

std::set<std::string> probes_hit(const ScenarioRun& r) {
    std::set<std::string> out;
    for (auto& v : r.result.violations) out.insert(v.probe);
    return out;
}

int count_kind(const RunResult& r, const std::string& kind) {
    int n = 0;
    for (auto& x : r.responses) n += x.kind == kind;
    return n;
}

// ------------------------------------------------------------------------ 1-4

void c1(Verdict& v) {
    auto f = fixture("fig1");
    const ProcSet W = f.attack.well_behaved();
    v.require(ints(minimal_quorums(f.system, f.attack)) == std::set<IntSet>{{1, 2}, {2, 3}, {2, 5}}, "MQ");
    v.require(check_consistency(f.system, f.attack, W).holds, "consistency at W");
    v.require(!check_availability(f.system, ProcSet{1}, W).holds, "availability fails for 1");
    v.require(check_available_inside(f.system, ProcSet{2, 3, 5}).holds, "available inside {2,3,5}");
    v.require(check_quorum_inclusion(f.system, f.attack, W).holds, "inclusion for W");
    v.require(maximal_outlived_sets(f.system, f.attack) == std::vector<ProcSet>{ProcSet{2, 3, 5}}, "outlived sets");
    v.note << "MQ {{1,2},{2,3},{2,5}}, outlived [{2,3,5}]";
}

void c2(Verdict& v) {
    auto f = fixture("fig2");
    auto sinks = sink_components(condense(build_graph(f.system)));
    v.require(sinks.size() == 1, "one sink");
    v.require(well_behaved_sink_members(f.system, f.attack) == ProcSet{1, 2, 3}, "well-behaved sink");
    v.require(ints(minimal_quorums(f.system, f.attack)) == std::set<IntSet>{{1, 2}, {1, 3, 5}}, "MQ");
    v.note << "sink " << (sinks.empty() ? std::string("none") : sinks[0].str()) << ", MQ {{1,2},{1,3,5}}";
}

void c3(Verdict& v) {
    auto f = fixture("fig2");
    const ProcSet sink = sink_members(f.system);
    for (int seed = 0; seed < kDiscoverySeeds; ++seed) {
        auto r = run_file("discovery_fig2", seed);
        ProcSet proto;
        for (ProcessId p : r.world->node_ids())
            if (r.world->node_as<DiscoveryNode>(p).state().in_sink) proto.insert(p);
        v.require(r.result.outcome == Outcome::Quiescent, "quiescent");
        v.require(ProcSet{1, 2, 3}.subset_of(proto), "completeness, seed " + std::to_string(seed));
        v.require(proto.subset_of(sink), "accuracy, seed " + std::to_string(seed));
        v.require(!proto.contains(4), "4 in sink, seed " + std::to_string(seed));
    }
    v.note << kDiscoverySeeds << " seeds";
}

void c4(Verdict& v) {
    Rng rng(4004);
    for (int i = 0; i < kGraphSystems; ++i) {
        auto g = gen_family_system(rng);
        const ProcSet W = g.attack.well_behaved();
        v.require(oracle_consistent(g.qs, g.attack, W) && oracle_sharing(g.qs), "generator precondition");
        auto graph = build_graph(g.qs);
        auto mq = minimal_quorums(g.qs, g.attack);
        ProcSet core;
        for (ProcSet m : mq) {
            core |= m & W;
            for (ProcessId a : m & W)
                for (ProcessId b : m & W) v.require(graph.has_edge(a, b), "clique");
        }
        for (ProcessId p : W)
            v.require(std::any_of(mq.begin(), mq.end(), [&](ProcSet m) { return m.subset_of(graph.succ[p]); }),
                      "adjacency");
        for (ProcessId a : core) {
            ProcSet seen = ProcSet::single(a), frontier = seen;
            while (!frontier.empty()) {
                ProcSet next;
                for (ProcessId x : frontier) next |= graph.succ[x] & core;
                frontier = next - seen;
                seen |= next;
            }
            v.require(core.subset_of(seen), "strong connectivity");
        }
        auto sinks = sink_components(condense(graph));
        v.require(sinks.size() == 1, "unique sink");
        if (sinks.size() == 1) v.require(core.subset_of(sinks[0]), "minimal quorums inside the sink");
        v.require(oracle_sinks(oracle_graph(g.qs)).size() == 1, "oracle sink count");
    }
    v.note << kGraphSystems << " systems";
}

// ------------------------------------------------------------------------ 5-6

Scenario leave_scenario(const Generated& g, Rng& rng) {
    Scenario sc;
    sc.system = g.qs;
    sc.attack = g.attack;
    sc.outlived = g.outlived;
    sc.record_trace = false;
    sc.policy.mode = ScheduleMode::AdversarialReorder;
    for (ProcessId p : random_subset(rng, g.attack.well_behaved() & g.qs.active(), 0.5)) {
        const QuorumSet& Q = g.qs.quorums(p);
        std::uint64_t at = static_cast<std::uint64_t>(uniform(rng, 0, 12));
        if (Q.size() < 2 || coin(rng)) sc.requests.push_back({p, MsgType::ReqLeave, {}, 0, at});
        else sc.requests.push_back({p, MsgType::ReqRemove, Q[static_cast<std::size_t>(uniform(rng, 0, int(Q.size()) - 1))], 0, at});
    }
    for (const char* n : {"consistency_outlived_left", "active_inclusion", "active_availability",
                          "inclusion_outlived_left", "available_inside_outlived_left"})
        sc.probes.push_back({n, {}});
    return sc;
}

void c5(Verdict& v) {
    Rng rng(5005);
    std::size_t runs = 0, violations = 0, completes = 0, fails = 0;
    for (int i = 0; i < kLeaveSystems; ++i) {
        auto g = gen_outlived_system(rng);
        Scenario sc = leave_scenario(g, rng);
        for (int s = 0; s < kLeaveSeeds; ++s) {
            sc.policy.seed = static_cast<std::uint64_t>(s);
            sc.adversary = s % 2 ? "random_lies" : "silent";
            auto r = run_scenario(sc);
            ++runs;
            violations += r.result.violations.size();
            if (!r.result.violations.empty() && v.pass) {
                auto& x = r.result.violations[0];
                v.require(false, "system " + std::to_string(i) + " seed " + std::to_string(s) + " " + x.probe + ": " + x.witness);
            }
            v.require(r.result.outcome == Outcome::Quiescent, "quiescent");
            for (auto& x : r.result.responses) {
                completes += x.kind == "LeaveComplete" || x.kind == "RemoveComplete";
                fails += x.kind == "LeaveFail" || x.kind == "RemoveFail";
            }
        }
    }
    v.require(violations <= kMaxViolations, "violations");
    v.require(completes > 0, "some request completes");
    v.note << runs << " runs, " << violations << " violations, " << completes << " completes, " << fails << " fails";
}

void c6(Verdict& v) {
    // the only intersection of the two outlived quorums is {1,2}
    v.require((ProcSet{1, 2, 3} & ProcSet{1, 2, 4}) == ProcSet{1, 2}, "fixture shape");
    for (std::size_t first : {0u, 1u}) {
        Scenario sc = load_scenario(source_path("scenarios/leave_pair.json"));
        sc.policy.mode = ScheduleMode::ScriptedInterleaving;
        sc.policy.script = {first};
        auto r = run_scenario(sc);
        int done = count_kind(r.result, "LeaveComplete"), failed = count_kind(r.result, "LeaveFail");
        v.require(done == 1 && failed == 1, "one complete and one fail");
        v.require(r.result.violations.empty(), "probes");
        ProcessId tob_first = kNoProcess;
        for (auto& line : r.result.trace) {
            auto e = nlohmann::json::parse(line);
            if (e["kind"] == "tob") {
                tob_first = e["src"].get<ProcessId>();
                break;
            }
        }
        v.require(!r.result.responses.empty() && tob_first != kNoProcess, "tob traffic");
        for (auto& x : r.result.responses)
            if (x.kind == "LeaveComplete") v.require(x.node == tob_first, "first in tob order wins");
        v.note << "order " << (first == 0 ? "1,2" : "2,1") << ": " << tob_first << " completes; ";
    }
}

// ------------------------------------------------------------------------ 7-8

void c7(Verdict& v) {
    Scenario base = load_scenario(source_path("scenarios/add_attack_concurrent.json"));
    base.record_trace = false;
    base.probes = {{"consistency_outlived", {}}, {"tentative_inclusion", {}}, {"exclusive_complete", {ProcSet{2, 3}}}};
    auto check = [&](const ScenarioRun& r, const std::string& label) {
        v.require(r.result.violations.empty(), label + " probes" +
                                                   (r.result.violations.empty() ? "" : ": " + r.result.violations[0].witness));
        v.require(count_kind(r.result, "AddComplete") <= 1, label + " both adds completed");
    };

    // Exhaustive: every choice sequence for the first kExhaustiveDepth steps, then lowest id.
    Scenario sc = base;
    sc.policy.mode = ScheduleMode::ScriptedInterleaving;
    std::vector<std::vector<std::size_t>> stack = {{}};
    std::size_t explored = 0;
    bool budget_hit = false;
    while (!stack.empty()) {
        if (explored >= static_cast<std::size_t>(kExhaustiveBudget)) {
            budget_hit = true;
            break;
        }
        std::vector<std::size_t> prefix = std::move(stack.back());
        stack.pop_back();
        sc.policy.script = prefix;
        auto r = run_scenario(sc);
        ++explored;
        check(r, "interleaving");
        const auto& br = r.result.branching;
        for (std::size_t j = prefix.size(); j < br.size() && j < static_cast<std::size_t>(kExhaustiveDepth); ++j)
            for (std::size_t c = 1; c < br[j]; ++c) {
                std::vector<std::size_t> next = prefix;
                next.resize(j, 0);
                next.push_back(c);
                stack.push_back(std::move(next));
            }
    }
    v.require(!budget_hit, "exhaustive enumeration exceeded its budget");

    for (int seed = 0; seed < kAddSeeds; ++seed) {
        Scenario rs = base;
        rs.policy.seed = static_cast<std::uint64_t>(seed);
        rs.policy.mode = seed % 2 ? ScheduleMode::RandomFair : ScheduleMode::AdversarialReorder;
        check(run_scenario(rs), "seed " + std::to_string(seed));
    }
    v.note << explored << " interleavings (depth " << kExhaustiveDepth << ") + " << kAddSeeds << " seeds";
}

void c8(Verdict& v) {
    int split = 0;
    for (int seed = 0; seed < kSplitSeeds; ++seed) {
        auto r = run_file("add_split_fig1", seed);
        v.require(r.result.violations.empty(), "seed " + std::to_string(seed) + " probes");
        std::set<AddKey> ok, failed;
        for (ProcessId p : r.world->node_ids()) {
            const auto& s = r.world->node_as<ReconfigNode>(p).state();
            ok.insert(s.succeeded.begin(), s.succeeded.end());
            failed.insert(s.fail_completed.begin(), s.fail_completed.end());
        }
        for (const AddKey& k : ok) v.require(!failed.count(k), "both paths for one key");
        bool saw_success = false, saw_fail = false;
        for (auto& line : r.result.trace) {
            saw_success = saw_success || line.find("\"Success\"") != std::string::npos;
            saw_fail = saw_fail || line.find("\"Fail\"") != std::string::npos;
        }
        split += saw_success && saw_fail;
    }
    v.note << kSplitSeeds << " seeds, " << split << " with a real Success/Fail split";
}

// ------------------------------------------------------------------------ 9-12

void c9(Verdict& v) {
    auto ac = run_file("ac_leave_fig4_q1");
    v.require(count_kind(ac.result, "LeaveComplete") == 1, "AC leave completes");
    v.require(probes_hit(ac) == std::set<std::string>{"policy"}, "AC: only the policy probe fires");

    auto pc = run_file("pc_leave_fig4_q1");
    v.require(count_kind(pc.result, "LeaveComplete") == 1, "PC leave completes");
    v.require(probes_hit(pc) == std::set<std::string>{"availability"}, "PC: only availability for 3 fails");

    // Q2: the add is carried out on the model, widening quorums just enough to keep
    // intersection at the outlived set; the protocol run is reported alongside.
    auto f = fixture("fig4_q2");
    const ProcSet O{2, 3};
    v.require(check_consistency(f.system, f.attack, O).holds, "Q2 consistent before");
    auto after = widen_for_add(f.system, f.attack, O, 2, ProcSet{1, 2});
    v.require(contains_quorum(after.quorums(2), ProcSet{1, 2}), "Q2 add completes");
    v.require(check_consistency(after, f.attack, O).holds, "Q2 consistency preserved");
    v.require(policy_violators(f.system, after, f.attack, {{2, {ProcSet{1, 2}}}}) == ProcSet{4}, "Q2 policy of 4 violated");
    auto proto = run_file("add_fig4_q2");
    v.note << "AC: policy only; PC: availability only; Q2 model add: violators {4}; Q2 protocol run: "
           << (proto.result.responses.empty() ? std::string("no response") : proto.result.responses[0].kind);
}

void c10(Verdict& v) {
    auto f = fixture("fig1");
    auto sc = load_scenario(source_path("scenarios/join_fig1.json"));
    auto r = run_scenario(sc);
    v.require(count_kind(r.result, "JoinComplete") == 1, "join completes");
    v.require(r.result.violations.empty(), "join probe");
    const auto& s6 = r.world->node_as<ReconfigNode>(6).state();
    auto want = oracle_join(f.system, ProcSet{2}, {{4, {IntSet{4}}}});
    v.require(ints(s6.Q) == want, "fixpoint quorums");

    // reports over the original processes are unchanged
    QuorumSystem snap = snapshot(*r.world, sc);
    Declarations d;
    for (auto& [p, Q] : snap.declarations())
        if (p != 6) d[p] = Q;
    QuorumSystem old = QuorumSystem::unchecked(f.system.universe(), f.system.active(), d);
    const ProcSet W = f.attack.well_behaved();
    auto reports = [&](const QuorumSystem& qs) {
        nlohmann::json j;
        j["c"] = report_to_json(check_consistency(qs, f.attack, W));
        j["a"] = report_to_json(check_availability(qs, W, W));
        j["i"] = report_to_json(check_quorum_inclusion(qs, f.attack, W));
        j["s"] = report_to_json(check_quorum_sharing(qs));
        j["o"] = maximal_outlived_sets(qs, f.attack).size();
        return j.dump();
    };
    v.require(reports(old) == reports(f.system), "pre-existing reports");

    auto t = run_file("join_timeout");
    v.require(count_kind(t.result, "JoinTimeout") == 1, "silent target times out");
    v.note << "Q(6) = {{1,2,4},{2,3},{2,5}}; timeout path ok";
}

void c11(Verdict& v) {
    Rng rng(1111);
    std::size_t runs = 0, delivered_runs = 0;
    for (int i = 0; i < kBrbSystems; ++i) {
        auto g = gen_outlived_system(rng);
        Scenario sc;
        sc.protocol = Protocol::Brb;
        sc.system = g.qs;
        sc.attack = g.attack;
        sc.outlived = g.outlived;
        sc.record_trace = false;
        sc.adversary = g.attack.byzantine.empty() || i % 2 ? "random_lies" : "brb_equivocate";
        sc.policy.mode = i % 3 ? ScheduleMode::RandomFair : ScheduleMode::AdversarialReorder;
        sc.policy.seed = rng();
        sc.requests.push_back({random_member(rng, g.outlived), MsgType::ReqBroadcast, {}, 1000 + i, 0});
        for (const char* n : {"brb_consistency", "brb_no_duplication", "brb_integrity", "brb_validity", "brb_totality"})
            sc.probes.push_back({n, {}});
        auto r = run_scenario(sc);
        ++runs;
        delivered_runs += count_kind(r.result, "Deliver") > 0;
        v.require(r.result.outcome == Outcome::Quiescent, "quiescent");
        if (!r.result.violations.empty())
            v.require(false, "system " + std::to_string(i) + " " + r.result.violations[0].probe + ": " +
                                 r.result.violations[0].witness);
    }
    v.note << runs << " runs, " << delivered_runs << " with deliveries";
}

void c12(Verdict& v) {
    int files = 0;
    for (const char* name : {"ac_leave_fig4_q1", "ac_remove_fig4_q1", "add_attack_concurrent", "add_fig4_q2",
                             "add_split_fig1", "brb_equivocate_fig1", "brb_honest_fig1", "discovery_fig2", "flood",
                             "join_fig1", "join_timeout", "leave_pair", "pc_leave_fig4_q1", "pc_remove_fig4_q1"}) {
        for (std::uint64_t seed : {0u, 7u}) {
            auto a = run_file(name, seed).result.trace_text();
            auto b = run_file(name, seed).result.trace_text();
            v.require(a == b && !a.empty(), std::string(name) + " seed " + std::to_string(seed));
        }
        ++files;
    }
    v.note << files << " scenarios x 2 seeds byte-identical";
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria = {
        {"fig1 fixture values", c1},
        {"fig2 sink and minimal quorums", c2},
        {"sink discovery under 5-deceives-4", c3},
        {"graph structure", c4},
        {"AC leave/remove preservation", c5},
        {"leave serialization", c6},
        {"add double-spend prevented", c7},
        {"split requester", c8},
        {"trade-off dilemmas", c9},
        {"join", c10},
        {"reliable broadcast", c11},
        {"determinism", c12},
    };
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(v);
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        all = all && v.pass;
        std::printf("criterion %2zu %s  %s (%.2fs): %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), secs,
                    v.note.str().c_str());
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}
