#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hqs/adversary.hpp"
#include "hqs/io.hpp"
#include "hqs/reconfig.hpp"
#include "hqs/sim.hpp"

namespace hqs {

enum class Protocol { Reconfig, Discovery, Brb };

struct RequestSpec {
    ProcessId node = kNoProcess;
    MsgType op = MsgType::ReqLeave;
    ProcSet q;  // Remove/Add quorum, Join bootstrap set
    std::int64_t value = 0;
    std::uint64_t at = 0;
};

struct ProbeSpec {
    std::string name;
    ProcSet set;  // probe-specific argument (e.g. the processes whose availability is checked)
};

struct Scenario {
    std::string name = "scenario";
    QuorumSystem system;
    Attack attack;
    Labels labels;
    ProcSet outlived;

    Protocol protocol = Protocol::Reconfig;
    ReconfigConfig reconfig;
    std::map<ProcessId, bool> in_sink;  // per-node override of reconfig.in_sink
    ProcSet joiners;                    // inactive well-behaved nodes that may Join
    std::optional<int> validq_threshold;  // discovery: threshold mode, else oracle
    TobLiveness tob = TobLiveness::AllWellBehaved;

    std::vector<RequestSpec> requests;
    std::string adversary = "silent";
    AdversaryParams adversary_params;
    SchedulePolicy policy;
    std::uint64_t step_cap = kDefaultStepCap;
    std::vector<ProbeSpec> probes;
    bool record_trace = true;
};

struct ScenarioRun {
    RunResult result;
    std::unique_ptr<World> world;
    nlohmann::json verdict;
    bool pass() const { return result.violations.empty(); }
};

// Names accepted in a scenario's "probes" list.
std::vector<std::string> probe_names();

// `base_dir` resolves a relative "system" path.
Scenario parse_scenario(const nlohmann::json& j, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

ScenarioRun run_scenario(const Scenario& sc);

// Current quorum system held by the simulated nodes. Byzantine declarations are
// taken from the initial system; frozen leavers are dropped unless asked for.
QuorumSystem snapshot(const World& w, const Scenario& sc, bool include_left = false);
TentativeMap tentative_map(const World& w);

nlohmann::json discovery_to_json(const World& w, const Labels& labels = {});

// Post-state of Add(requester, q_new) in which every well-behaved quorum that
// misses q_new inside `outlived` is widened by q_new ∩ outlived.
QuorumSystem widen_for_add(const QuorumSystem& qs, const Attack& attack, ProcSet outlived, ProcessId requester,
                           ProcSet q_new);

// Well-behaved processes holding a quorum in `after` that is neither in their
// `before` declaration nor in `sanctioned` (quorums installed by completed operations).
ProcSet policy_violators(const QuorumSystem& before, const QuorumSystem& after, const Attack& attack,
                         const Declarations& sanctioned = {});

}  // namespace hqs
