#include "hqs/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>

#include "hqs/brb.hpp"
#include "hqs/discovery.hpp"
#include "hqs/graph.hpp"
#include "hqs/props.hpp"

namespace hqs {

using nlohmann::json;

// ---------------------------------------------------------------- snapshots

QuorumSystem snapshot(const World& w, const Scenario& sc, bool include_left) {
    if (sc.protocol != Protocol::Reconfig) return sc.system;
    Declarations decls;
    ProcSet active;
    for (ProcessId p : sc.system.active() & sc.attack.byzantine) {
        active.insert(p);
        if (sc.system.declared(p)) decls[p] = sc.system.quorums(p);
    }
    for (ProcessId p : w.node_ids()) {
        const ReconfigState& s = w.node_as<ReconfigNode>(p).state();
        if (s.active || (s.frozen && include_left)) {
            decls[p] = s.Q;
            active.insert(p);
        }
    }
    return QuorumSystem::unchecked(sc.system.universe(), active, std::move(decls));
}

TentativeMap tentative_map(const World& w) {
    TentativeMap out;
    for (ProcessId p : w.node_ids())
        if (auto* n = dynamic_cast<const ReconfigNode*>(w.node(p)))
            if (!n->state().tentative.empty()) out[p] = n->state().tentative;
    return out;
}

json discovery_to_json(const World& w, const Labels& labels) {
    json in_sink = json::object(), followers = json::object();
    for (ProcessId p : w.node_ids()) {
        const auto& s = w.node_as<DiscoveryNode>(p).state();
        in_sink[labels.name(p)] = s.in_sink;
        followers[labels.name(p)] = set_to_json(s.F, labels);
    }
    return {{"in_sink", in_sink}, {"followers", followers}};
}

QuorumSystem widen_for_add(const QuorumSystem& qs, const Attack& attack, ProcSet outlived, ProcessId requester,
                           ProcSet q_new) {
    Declarations decls = qs.declarations();
    decls[requester].push_back(q_new);
    const ProcSet core = q_new & outlived;
    for (auto& [p, Q] : decls) {
        if (attack.is_byzantine(p)) continue;
        for (ProcSet& q : Q)
            if ((q & core).empty()) q = q | core;
        Q = normalize(std::move(Q));
    }
    return QuorumSystem::unchecked(qs.universe(), qs.active(), std::move(decls));
}

ProcSet policy_violators(const QuorumSystem& before, const QuorumSystem& after, const Attack& attack,
                         const Declarations& sanctioned) {
    ProcSet out;
    for (auto& [p, Q] : after.declarations()) {
        if (attack.is_byzantine(p)) continue;
        auto extra = sanctioned.find(p);
        for (ProcSet q : Q) {
            bool ok = contains_quorum(before.quorums(p), q) ||
                      (extra != sanctioned.end() && contains_quorum(extra->second, q));
            if (!ok) out.insert(p);
        }
    }
    return out;
}

// ------------------------------------------------------------------- probes

namespace {

struct ProbeCtx {
    const Scenario& sc;
    const World& w;
    ProcSet W() const { return sc.attack.well_behaved(); }
    ProcSet left() const { return w.responded({"LeaveComplete", "RemoveComplete"}); }
    QuorumSystem snap() const { return snapshot(w, sc); }
};

using ProbeFn = std::function<std::optional<std::string>(const ProbeCtx&, ProcSet arg)>;

std::optional<std::string> report(const PropertyReport& r) {
    if (r.holds) return std::nullopt;
    return r.describe();
}

template <typename F>
void each_reconfig(const World& w, F&& f) {
    for (ProcessId p : w.node_ids())
        if (auto* n = dynamic_cast<const ReconfigNode*>(w.node(p))) f(p, n->state());
}

template <typename F>
void each_brb(const World& w, F&& f) {
    for (ProcessId p : w.node_ids())
        if (auto* n = dynamic_cast<const BrbNode*>(w.node(p))) f(p, *n);
}

std::map<ProcessId, std::int64_t> broadcast_values(const Scenario& sc) {
    std::map<ProcessId, std::int64_t> out;
    for (const RequestSpec& r : sc.requests)
        if (r.op == MsgType::ReqBroadcast && !out.count(r.node)) out[r.node] = r.value;
    return out;
}

struct ProbeDef {
    ProbeFn fn;
    bool final_only;
};

const std::map<std::string, ProbeDef>& probe_table() {
    static const std::map<std::string, ProbeDef> table = {
        {"consistency",
         {[](const ProbeCtx& c, ProcSet) { return report(check_consistency(c.snap(), c.sc.attack, c.W())); },
          false}},
        {"consistency_outlived",
         {[](const ProbeCtx& c, ProcSet) {
              return report(check_consistency(c.snap(), c.sc.attack, c.sc.outlived));
          },
          false}},
        {"consistency_outlived_left",
         {[](const ProbeCtx& c, ProcSet) {
              return report(check_consistency(c.snap(), c.sc.attack, c.sc.outlived - c.left()));
          },
          false}},
        {"active_inclusion",
         {[](const ProbeCtx& c, ProcSet) {
              ProcSet L = c.left();
              return report(check_active_inclusion(c.snap(), c.sc.attack, c.sc.outlived - L, L));
          },
          false}},
        {"active_availability",
         {[](const ProbeCtx& c, ProcSet) {
              return report(check_active_availability(c.snap(), c.sc.outlived, c.left()));
          },
          false}},
        {"tentative_inclusion",
         {[](const ProbeCtx& c, ProcSet) {
              return report(
                  check_tentative_inclusion(c.snap(), c.sc.attack, c.sc.outlived, tentative_map(c.w)));
          },
          false}},
        {"inclusion_outlived",
         {[](const ProbeCtx& c, ProcSet) {
              return report(check_quorum_inclusion(c.snap(), c.sc.attack, c.sc.outlived));
          },
          true}},
        {"inclusion_outlived_left",
         {[](const ProbeCtx& c, ProcSet) {
              return report(check_quorum_inclusion(c.snap(), c.sc.attack, c.sc.outlived - c.left()));
          },
          true}},
        {"available_inside_outlived_left",
         {[](const ProbeCtx& c, ProcSet) {
              return report(check_available_inside(c.snap(), c.sc.outlived - c.left()));
          },
          true}},
        {"availability",
         {[](const ProbeCtx& c, ProcSet arg) {
              ProcSet P = arg.empty() ? c.sc.outlived : arg;
              return report(check_availability(c.snap(), P, c.W() - c.w.responded({"LeaveComplete"})));
          },
          true}},
        {"policy",
         {[](const ProbeCtx& c, ProcSet arg) -> std::optional<std::string> {
              std::optional<std::string> bad;
              each_reconfig(c.w, [&](ProcessId p, const ReconfigState& s) {
                  if (bad || !s.active || (!arg.empty() && !arg.contains(p))) return;
                  for (ProcSet q : s.Q)
                      if (!contains_quorum(s.sanctioned, q)) {
                          bad = "process " + std::to_string(p) + " holds unsanctioned quorum " + q.str();
                          return;
                      }
              });
              return bad;
          },
          false}},
        {"add_exclusive",
         {[](const ProbeCtx& c, ProcSet) -> std::optional<std::string> {
              std::set<AddKey> ok, failed;
              each_reconfig(c.w, [&](ProcessId, const ReconfigState& s) {
                  ok.insert(s.succeeded.begin(), s.succeeded.end());
                  failed.insert(s.fail_completed.begin(), s.fail_completed.end());
              });
              for (const AddKey& k : ok)
                  if (failed.count(k))
                      return "add by " + std::to_string(k.first) + " with q_c " + ProcSet::from_bits(k.second).str() +
                             " both succeeded and failed";
              return std::nullopt;
          },
          false}},
        {"exclusive_complete",
         {[](const ProbeCtx& c, ProcSet arg) -> std::optional<std::string> {
              ProcSet done =
                  c.w.responded({"LeaveComplete", "RemoveComplete", "AddComplete"}) & (arg.empty() ? c.W() : arg);
              if (done.size() <= 1) return std::nullopt;
              return "several requests completed: " + done.str();
          },
          false}},
        {"join",
         {[](const ProbeCtx& c, ProcSet) -> std::optional<std::string> {
              std::optional<std::string> bad;
              each_reconfig(c.w, [&](ProcessId p, const ReconfigState& s) {
                  if (bad) return;
                  if (!c.sc.joiners.contains(p)) {
                      if (s.Q != c.sc.system.quorums(p)) bad = "existing process " + std::to_string(p) + " changed";
                      return;
                  }
                  if (!s.active) return;
                  for (ProcSet q : s.Q)
                      for (ProcessId m : q) {
                          auto it = s.join_qmap.find(m);
                          bool covered = it != s.join_qmap.end() &&
                                         std::any_of(it->second.begin(), it->second.end(),
                                                     [q](ProcSet x) { return x.subset_of(q); });
                          if (!covered) {
                              bad = "joined " + std::to_string(p) + " quorum " + q.str() + " lacks member " +
                                    std::to_string(m);
                              return;
                          }
                      }
              });
              return bad;
          },
          true}},
        {"discovery_accuracy",
         {[](const ProbeCtx& c, ProcSet) -> std::optional<std::string> {
              ProcSet sink = sink_members(c.sc.system);
              for (ProcessId p : c.w.node_ids())
                  if (c.w.node_as<DiscoveryNode>(p).state().in_sink && !sink.contains(p))
                      return "process " + std::to_string(p) + " claims sink membership";
              return std::nullopt;
          },
          false}},
        {"discovery_completeness",
         {[](const ProbeCtx& c, ProcSet) -> std::optional<std::string> {
              for (ProcSet q : minimal_quorums(c.sc.system, c.sc.attack))
                  for (ProcessId p : q & c.W())
                      if (!c.w.node_as<DiscoveryNode>(p).state().in_sink)
                          return "process " + std::to_string(p) + " of minimal quorum " + q.str() + " not in sink";
              return std::nullopt;
          },
          true}},
        {"not_in_sink",
         {[](const ProbeCtx& c, ProcSet arg) -> std::optional<std::string> {
              for (ProcessId p : arg & c.w.node_ids())
                  if (c.w.node_as<DiscoveryNode>(p).state().in_sink)
                      return "process " + std::to_string(p) + " set in_sink";
              return std::nullopt;
          },
          false}},
        {"brb_consistency",
         {[](const ProbeCtx& c, ProcSet) -> std::optional<std::string> {
              std::map<ProcessId, std::pair<ProcessId, std::int64_t>> first;
              std::optional<std::string> bad;
              each_brb(c.w, [&](ProcessId p, const BrbNode& n) {
                  for (auto& [origin, in] : n.instances()) {
                      if (bad || !in.delivered) continue;
                      auto [it, fresh] = first.try_emplace(origin, p, in.delivered_value);
                      if (!fresh && it->second.second != in.delivered_value)
                          bad = "instance " + std::to_string(origin) + ": " + std::to_string(it->second.first) +
                                " delivered " + std::to_string(it->second.second) + ", " + std::to_string(p) +
                                " delivered " + std::to_string(in.delivered_value);
                  }
              });
              return bad;
          },
          false}},
        {"brb_no_duplication",
         {[](const ProbeCtx& c, ProcSet) -> std::optional<std::string> {
              std::map<ProcessId, int> count;
              for (const Response& r : c.w.responses())
                  if (r.kind == "Deliver") ++count[r.node];
              std::optional<std::string> bad;
              each_brb(c.w, [&](ProcessId p, const BrbNode& n) {
                  int delivered = 0;
                  for (auto& [origin, in] : n.instances()) delivered += in.delivered;
                  if (!bad && count[p] != delivered)
                      bad = "process " + std::to_string(p) + " delivered " + std::to_string(count[p]) + " times";
              });
              return bad;
          },
          false}},
        {"brb_integrity",
         {[](const ProbeCtx& c, ProcSet) -> std::optional<std::string> {
              auto sent = broadcast_values(c.sc);
              std::optional<std::string> bad;
              each_brb(c.w, [&](ProcessId p, const BrbNode& n) {
                  for (auto& [origin, in] : n.instances()) {
                      if (bad || !in.delivered || c.sc.attack.is_byzantine(origin)) continue;
                      auto it = sent.find(origin);
                      if (it == sent.end() || it->second != in.delivered_value)
                          bad = "process " + std::to_string(p) + " delivered a value " + std::to_string(origin) +
                                " never sent";
                  }
              });
              return bad;
          },
          false}},
        {"brb_validity",
         {[](const ProbeCtx& c, ProcSet) -> std::optional<std::string> {
              for (auto& [origin, v] : broadcast_values(c.sc)) {
                  if (c.sc.attack.is_byzantine(origin)) continue;
                  for (ProcessId p : c.sc.outlived) {
                      const auto& inst = c.w.node_as<BrbNode>(p).instances();
                      auto it = inst.find(origin);
                      if (it == inst.end() || !it->second.delivered || it->second.delivered_value != v)
                          return "process " + std::to_string(p) + " did not deliver " + std::to_string(v) +
                                 " from " + std::to_string(origin);
                  }
              }
              return std::nullopt;
          },
          true}},
        {"brb_totality",
         {[](const ProbeCtx& c, ProcSet) -> std::optional<std::string> {
              std::set<ProcessId> delivered_somewhere;
              each_brb(c.w, [&](ProcessId, const BrbNode& n) {
                  for (auto& [origin, in] : n.instances())
                      if (in.delivered) delivered_somewhere.insert(origin);
              });
              for (ProcessId origin : delivered_somewhere)
                  for (ProcessId p : c.sc.outlived) {
                      const auto& inst = c.w.node_as<BrbNode>(p).instances();
                      auto it = inst.find(origin);
                      if (it == inst.end() || !it->second.delivered)
                          return "process " + std::to_string(p) + " missed instance " + std::to_string(origin);
                  }
              return std::nullopt;
          },
          true}},
    };
    return table;
}

std::vector<ProbeSpec> default_probes(const Scenario& sc) {
    std::vector<std::string> names;
    switch (sc.protocol) {
    case Protocol::Reconfig:
        if (sc.reconfig.mode == LeaveMode::AC)
            names = {"consistency_outlived_left", "active_inclusion", "active_availability",
                     "inclusion_outlived_left", "available_inside_outlived_left"};
        else
            names = {"consistency", "policy"};
        break;
    case Protocol::Discovery: names = {"discovery_accuracy", "discovery_completeness"}; break;
    case Protocol::Brb:
        names = {"brb_consistency", "brb_no_duplication", "brb_integrity", "brb_validity", "brb_totality"};
        break;
    }
    std::vector<ProbeSpec> out;
    for (auto& n : names) out.push_back({n, {}});
    return out;
}

// ------------------------------------------------------------------ parsing

const std::map<std::string, MsgType>& op_table() {
    static const std::map<std::string, MsgType> t = {
        {"leave", MsgType::ReqLeave},         {"remove", MsgType::ReqRemove},
        {"add", MsgType::ReqAdd},             {"join", MsgType::ReqJoin},
        {"broadcast", MsgType::ReqBroadcast}, {"discover", MsgType::ReqDiscover},
    };
    return t;
}

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::InputError, "scenario field '" + field + "': " + what);
}

ProcessId id_at(const json& j, const Labels& labels, const std::string& field) {
    try {
        return labels.id(j);
    } catch (const Error& e) {
        bad(field, e.what());
    }
}

}  // namespace

std::vector<std::string> probe_names() {
    std::vector<std::string> out;
    for (auto& [name, def] : probe_table()) out.push_back(name);
    return out;
}

Scenario parse_scenario(const json& j, const std::string& base_dir) {
    if (!j.is_object()) bad("<root>", "expected an object");
    Scenario sc;
    sc.name = j.value("name", std::string("scenario"));

    if (!j.contains("system")) bad("system", "missing");
    SystemFile sf;
    if (j["system"].is_string()) {
        std::filesystem::path path = j["system"].get<std::string>();
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        sf = load_system(path.string());
    } else {
        sf = parse_system(j["system"]);
    }
    sc.labels = sf.labels;
    ProcSet joiners;
    if (j.contains("joiners")) joiners = set_from_json(j["joiners"], sc.labels, "joiners");
    if (joiners.intersects(sf.system.active())) bad("joiners", "joiners must not be active");
    sc.joiners = joiners;
    sc.system = QuorumSystem::unchecked(sf.system.universe() | joiners, sf.system.active(),
                                        sf.system.declarations());
    sc.attack = Attack::make(sf.attack.universe | joiners, sf.attack.byzantine);

    if (j.contains("outlived")) sc.outlived = set_from_json(j["outlived"], sc.labels, "outlived");
    if (!sc.outlived.subset_of(sc.attack.well_behaved())) bad("outlived", "must be well-behaved");

    std::string proto = j.value("protocol", std::string("reconfig"));
    if (proto == "reconfig") sc.protocol = Protocol::Reconfig;
    else if (proto == "discovery") sc.protocol = Protocol::Discovery;
    else if (proto == "brb") sc.protocol = Protocol::Brb;
    else bad("protocol", "unknown protocol '" + proto + "'");

    std::string mode = j.value("mode", std::string("AC"));
    if (mode == "AC") sc.reconfig.mode = LeaveMode::AC;
    else if (mode == "PC") sc.reconfig.mode = LeaveMode::PC;
    else bad("mode", "expected AC or PC");
    sc.reconfig.combined = j.value("combined", true);
    sc.reconfig.join_timeout = j.value("join_timeout", sc.reconfig.join_timeout);
    if (j.contains("in_sink")) {
        const json& s = j["in_sink"];
        if (s.is_boolean()) {
            sc.reconfig.in_sink = s.get<bool>();
        } else if (s.is_object()) {
            for (auto& [k, v] : s.items()) {
                json key = std::all_of(k.begin(), k.end(), ::isdigit) && !k.empty() ? json(std::stoi(k)) : json(k);
                sc.in_sink[id_at(key, sc.labels, "in_sink")] = v.get<bool>();
            }
        } else {
            bad("in_sink", "expected a boolean or an object");
        }
    }
    if (j.contains("validq")) {
        const json& v = j["validq"];
        if (v.is_object() && v.contains("threshold")) sc.validq_threshold = v["threshold"].get<int>();
        else if (!(v.is_string() && v.get<std::string>() == "oracle")) bad("validq", "expected \"oracle\" or {\"threshold\": k}");
    }
    std::string tob = j.value("tob_liveness", std::string("all"));
    if (tob == "all") sc.tob = TobLiveness::AllWellBehaved;
    else if (tob == "outlived") sc.tob = TobLiveness::OutlivedOnly;
    else bad("tob_liveness", "expected all or outlived");

    if (j.contains("requests")) {
        if (!j["requests"].is_array()) bad("requests", "expected an array");
        std::size_t i = 0;
        for (const json& r : j["requests"]) {
            std::string field = "requests[" + std::to_string(i++) + "]";
            RequestSpec spec;
            if (!r.contains("node")) bad(field + ".node", "missing");
            spec.node = id_at(r["node"], sc.labels, field + ".node");
            std::string op = r.value("op", std::string());
            auto it = op_table().find(op);
            if (it == op_table().end()) bad(field + ".op", "unknown op '" + op + "'");
            spec.op = it->second;
            if (r.contains("q")) spec.q = set_from_json(r["q"], sc.labels, field + ".q");
            if (r.contains("ps")) spec.q = set_from_json(r["ps"], sc.labels, field + ".ps");
            spec.value = r.value("value", std::int64_t{0});
            spec.at = r.value("at", std::uint64_t{0});
            sc.requests.push_back(spec);
        }
    }

    if (j.contains("adversary")) {
        const json& a = j["adversary"];
        if (a.is_string()) {
            sc.adversary = a.get<std::string>();
        } else if (a.is_object()) {
            sc.adversary = a.value("name", std::string("silent"));
            AdversaryParams& p = sc.adversary_params;
            if (a.contains("requester")) p.requester = id_at(a["requester"], sc.labels, "adversary.requester");
            if (a.contains("qc")) p.qc = set_from_json(a["qc"], sc.labels, "adversary.qc");
            if (a.contains("targets")) p.targets = set_from_json(a["targets"], sc.labels, "adversary.targets");
            if (a.contains("claim"))
                for (const json& q : a["claim"]) p.claim.push_back(set_from_json(q, sc.labels, "adversary.claim"));
            p.budget = a.value("budget", p.budget);
        } else {
            bad("adversary", "expected a name or an object");
        }
        make_adversary(sc.adversary, sc.adversary_params);  // validate early
    }

    if (!j.contains("seed")) bad("seed", "missing (needed for reproducibility)");
    sc.policy.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("policy")) {
        const json& p = j["policy"];
        std::string m = p.value("mode", std::string("random"));
        if (m == "random") sc.policy.mode = ScheduleMode::RandomFair;
        else if (m == "adversarial") sc.policy.mode = ScheduleMode::AdversarialReorder;
        else if (m == "scripted") sc.policy.mode = ScheduleMode::ScriptedInterleaving;
        else bad("policy.mode", "expected random, adversarial or scripted");
        sc.policy.fairness_bound = p.value("fairness_bound", sc.policy.fairness_bound);
        if (p.contains("script")) sc.policy.script = p["script"].get<std::vector<std::size_t>>();
    }
    sc.step_cap = j.value("step_cap", sc.step_cap);

    if (j.contains("probes")) {
        for (const json& p : j["probes"]) {
            ProbeSpec spec;
            if (p.is_string()) {
                spec.name = p.get<std::string>();
            } else {
                spec.name = p.value("name", std::string());
                if (p.contains("set")) spec.set = set_from_json(p["set"], sc.labels, "probes.set");
            }
            if (!probe_table().count(spec.name)) bad("probes", "unknown probe '" + spec.name + "'");
            sc.probes.push_back(spec);
        }
    } else {
        sc.probes = default_probes(sc);
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    json j = read_json_file(path);
    return parse_scenario(j, std::filesystem::path(path).parent_path().string());
}

// ------------------------------------------------------------------- runner

ScenarioRun run_scenario(const Scenario& sc) {
    ScenarioRun out;
    out.world = std::make_unique<World>(sc.attack, sc.policy, sc.step_cap);
    World& w = *out.world;
    w.set_record_trace(sc.record_trace);
    w.set_tob_liveness(sc.tob, sc.outlived);

    const ProcSet W = sc.attack.well_behaved();
    const ProcSet hosts = (sc.system.active() & W) | sc.joiners;
    for (ProcessId p : hosts) {
        const QuorumSet& Q = sc.system.quorums(p);
        switch (sc.protocol) {
        case Protocol::Reconfig: {
            ReconfigConfig cfg = sc.reconfig;
            if (auto it = sc.in_sink.find(p); it != sc.in_sink.end()) cfg.in_sink = it->second;
            bool joiner = sc.joiners.contains(p);
            w.add_node(p, std::make_unique<ReconfigNode>(joiner ? QuorumSet{} : Q,
                                                         joiner ? ProcSet{} : followers(sc.system, p), cfg, !joiner));
            break;
        }
        case Protocol::Discovery: {
            ValidQ v = sc.validq_threshold ? validq_threshold(*sc.validq_threshold)
                                           : validq_oracle(minimal_quorums(sc.system, sc.attack));
            w.add_node(p, std::make_unique<DiscoveryNode>(Q, std::move(v)));
            break;
        }
        case Protocol::Brb:
            w.add_node(p, std::make_unique<BrbNode>(Q, followers(sc.system, p), sc.system.active()));
            break;
        }
    }
    w.set_adversary(make_adversary(sc.adversary, sc.adversary_params));

    std::vector<RequestSpec> requests = sc.requests;
    if (requests.empty() && sc.protocol == Protocol::Discovery)
        for (ProcessId p : hosts) requests.push_back({p, MsgType::ReqDiscover, {}, 0, 0});
    for (const RequestSpec& r : requests) {
        if (!hosts.contains(r.node)) continue;  // requests at Byzantine ids are the adversary's business
        Msg m;
        m.type = r.op;
        m.q = r.q;
        m.value = r.value;
        w.inject_request(r.node, m, r.at);
    }

    for (const ProbeSpec& spec : sc.probes) {
        const ProbeDef& def = probe_table().at(spec.name);
        Probe probe = [&sc, def, arg = spec.set](const World& world) -> std::optional<std::string> {
            try {
                return def.fn(ProbeCtx{sc, world}, arg);
            } catch (const Error& e) {
                return std::string("error: ") + e.what();
            }
        };
        if (def.final_only) w.add_final_probe(spec.name, probe);
        else w.add_probe(spec.name, probe);
    }

    out.result = w.run();

    const Labels& L = sc.labels;
    json v;
    v["scenario"] = sc.name;
    v["seed"] = sc.policy.seed;
    v["outcome"] = outcome_name(out.result.outcome);
    v["steps"] = out.result.steps;
    v["pass"] = out.result.violations.empty();
    v["violations"] = json::array();
    for (const Violation& x : out.result.violations)
        v["violations"].push_back({{"step", x.step}, {"probe", x.probe}, {"witness", x.witness}});
    v["responses"] = json::array();
    for (const Response& r : out.result.responses) {
        json e = {{"step", r.step}, {"node", L.external(r.node)}, {"kind", r.kind}};
        if (r.kind == "Deliver") e["value"] = r.value;
        v["responses"].push_back(e);
    }
    switch (sc.protocol) {
    case Protocol::Reconfig: v["final_system"] = system_to_json(snapshot(w, sc), sc.attack, L); break;
    case Protocol::Discovery: v["discovery"] = discovery_to_json(w, L); break;
    case Protocol::Brb: {
        json d = json::object();
        each_brb(w, [&](ProcessId p, const BrbNode& n) {
            json inst = json::object();
            for (auto& [origin, in] : n.instances())
                if (in.delivered) inst[L.name(origin)] = in.delivered_value;
            d[L.name(p)] = inst;
        });
        v["delivered"] = d;
        break;
    }
    }
    out.verdict = std::move(v);
    return out;
}

}  // namespace hqs
