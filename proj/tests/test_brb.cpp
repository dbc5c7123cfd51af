#include <doctest.h>

#include "hqs/brb.hpp"
#include "hqs/scenario.hpp"
#include "support.hpp"

using namespace hqs;
using namespace hqs::testing;
using nlohmann::json;

namespace {

ScenarioRun run(json j) {
    j["protocol"] = "brb";
    if (!j.contains("seed")) j["seed"] = 0;
    return run_scenario(parse_scenario(j, source_path("fixtures")));
}

std::map<ProcessId, std::int64_t> delivered(const ScenarioRun& r, ProcessId origin) {
    std::map<ProcessId, std::int64_t> out;
    for (ProcessId p : r.world->node_ids()) {
        const auto& inst = r.world->node_as<BrbNode>(p).instances();
        auto it = inst.find(origin);
        if (it != inst.end() && it->second.delivered) out[p] = it->second.delivered_value;
    }
    return out;
}

// Byzantine 4 sends a Send that names 2 as origin.
struct Masquerade : Adversary {
    std::string name() const override { return "masquerade"; }
    void on_start(AdversaryContext& ctx) override {
        Msg m{MsgType::BrbSend};
        m.a = 2;
        m.value = 9;
        for (ProcessId p : ProcSet{1, 2, 3, 5}) ctx.send(4, p, m);
    }
};

}  // namespace

TEST_CASE("honest broadcast on fig1 reaches every outlived process") {
    auto r = run({{"system", "fig1.json"}, {"outlived", {2, 3, 5}}, {"requests", {{{"node", 2}, {"op", "broadcast"}, {"value", 7}}}}});
    CHECK(r.result.violations.empty());
    auto d = delivered(r, 2);
    for (ProcessId p : ProcSet{2, 3, 5}) CHECK(d[p] == 7);
    CHECK_FALSE(d.count(1));  // 1 waits on a ready quorum {1,2,4} with a silent 4
}

TEST_CASE("a second broadcast at the same origin is refused") {
    auto r = run({{"system", "fig1.json"},
                  {"outlived", {2, 3, 5}},
                  {"requests", {{{"node", 2}, {"op", "broadcast"}, {"value", 1}}, {{"node", 2}, {"op", "broadcast"}, {"value", 2}}}}});
    int dup = 0;
    for (auto& x : r.result.responses) dup += x.kind == "DuplicateInstance";
    CHECK(dup == 1);
    CHECK(delivered(r, 2).at(3) == 1);
}

TEST_CASE("Send for someone else's instance is ignored") {
    auto f = fixture("fig1");
    World w(f.attack, {});
    for (ProcessId p : ProcSet{1, 2, 3, 5})
        w.add_node(p, std::make_unique<BrbNode>(f.system.quorums(p), followers(f.system, p), f.system.active()));
    w.set_adversary(std::make_unique<Masquerade>());
    auto r = w.run();
    CHECK(r.responses.empty());
    for (ProcessId p : ProcSet{1, 2, 3, 5}) CHECK(w.node_as<BrbNode>(p).instances().empty());
}

TEST_CASE("equivocating byzantine origin never splits deliveries") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto r = run({{"system", "fig1.json"}, {"outlived", {2, 3, 5}}, {"adversary", "brb_equivocate"},
                      {"policy", {{"mode", "adversarial"}}}, {"seed", seed}});
        CHECK(r.result.violations.empty());
        auto d = delivered(r, 4);
        std::set<std::int64_t> values;
        for (auto& [p, v] : d) values.insert(v);
        CHECK(values.size() <= 1);
    }
}

TEST_CASE("property: broadcast guarantees on generated outlived systems") {
    Rng rng(71);
    for (int i = 0; i < 40; ++i) {
        auto g = gen_outlived_system(rng);
        Scenario sc;
        sc.protocol = Protocol::Brb;
        sc.system = g.qs;
        sc.attack = g.attack;
        sc.outlived = g.outlived;
        sc.record_trace = false;
        sc.adversary = i % 2 ? "brb_equivocate" : "random_lies";
        sc.policy.mode = ScheduleMode::AdversarialReorder;
        sc.policy.seed = rng();
        ProcessId origin = random_member(rng, g.outlived);
        sc.requests.push_back({origin, MsgType::ReqBroadcast, {}, 40 + i, 0});
        for (const char* n : {"brb_consistency", "brb_no_duplication", "brb_integrity", "brb_validity", "brb_totality"})
            sc.probes.push_back({n, {}});
        auto r = run_scenario(sc);
        CHECK(r.result.outcome == Outcome::Quiescent);
        for (auto& v : r.result.violations) FAIL_CHECK(v.probe << ": " << v.witness);
    }
}
