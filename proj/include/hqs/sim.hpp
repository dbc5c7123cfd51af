#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hqs/quorum_system.hpp"

namespace hqs {

enum class MsgType : std::uint8_t {
    // client requests
    ReqDiscover,
    ReqLeave,
    ReqRemove,
    ReqAdd,
    ReqJoin,
    ReqBroadcast,
    // sink discovery
    Exchange,
    Extend,
    // leave / remove
    Check,
    Left,
    // join
    Prob,
    Quorums,
    // add
    Inclusion,
    AckInclusion,
    NackInclusion,
    CheckAdd,
    AddCheck,
    CheckAck,
    CheckNack,
    Commit,
    Abort,
    Success,
    Fail,
    // reliable broadcast
    BrbSend,
    BrbEcho,
    BrbReady,
    // kernel timers and adversary noise
    Timer,
    Junk,
};

const char* msg_type_name(MsgType t);

struct Signature {
    ProcessId signer = kNoProcess;
    std::uint64_t digest = 0;
    bool operator==(const Signature&) const = default;
};

// One flat message shape shared by every protocol; unused fields stay at defaults.
struct Msg {
    MsgType type = MsgType::Junk;
    ProcessId a = kNoProcess;  // subject: requester, leaver, broadcast instance
    ProcessId b = kNoProcess;  // secondary process
    ProcSet q;
    QuorumSet qs;
    std::vector<Signature> sigs;
    std::int64_t value = 0;
    bool flag = false;

    std::string json() const;
    // Canonical bytes covered by signatures (everything but sigs).
    std::string payload() const;
};

enum class Channel { Apl, Tob, Request, Timer };
const char* channel_name(Channel c);

struct Envelope {
    std::uint64_t id = 0;
    ProcessId src = kNoProcess;
    ProcessId dst = kNoProcess;
    Channel channel = Channel::Apl;
    Msg msg;
    std::uint64_t seq = 0;       // per-link counter (APL) or global order (TOB)
    std::uint64_t enqueued = 0;  // step at which it entered the pool
    std::uint64_t due = 0;       // earliest delivery step (timers, delayed requests)
};

struct Response {
    std::uint64_t step;
    ProcessId node;
    std::string kind;
    std::int64_t value = 0;
};

enum class ScheduleMode { RandomFair, AdversarialReorder, ScriptedInterleaving };
const char* schedule_mode_name(ScheduleMode m);

struct SchedulePolicy {
    std::uint64_t seed = 0;
    ScheduleMode mode = ScheduleMode::RandomFair;
    std::uint64_t fairness_bound = 64;
    std::vector<std::size_t> script;  // ScriptedInterleaving: index into the eligible list per step
};

enum class TobLiveness { AllWellBehaved, OutlivedOnly };
enum class Outcome { Quiescent, StepCapExceeded };
const char* outcome_name(Outcome o);

inline constexpr std::uint64_t kDefaultStepCap = 10000;

struct Violation {
    std::uint64_t step;
    std::string probe;
    std::string witness;
};

struct RunResult {
    Outcome outcome = Outcome::Quiescent;
    std::uint64_t steps = 0;
    std::vector<std::string> trace;  // JSON lines
    std::vector<Violation> violations;
    std::vector<Response> responses;
    std::vector<std::size_t> branching;  // eligible-set size per step

    std::string trace_text() const;
};

class World;

class Context {
public:
    Context(World& w, ProcessId self) : world_(w), self_(self) {}
    ProcessId self() const { return self_; }
    std::uint64_t step() const;
    void send(ProcessId dst, Msg m);
    void tob_broadcast(Msg m);
    void respond(const std::string& kind, std::int64_t value = 0);
    Signature sign(const std::string& payload);
    bool verify(const Signature& sig, ProcessId signer, const std::string& payload) const;
    void set_timer(std::uint64_t after_steps, Msg m);

private:
    World& world_;
    ProcessId self_;
};

class Node {
public:
    virtual ~Node() = default;
    virtual void on_message(Context& ctx, const Envelope& env) = 0;
    virtual bool halted() const { return false; }
};

class AdversaryContext {
public:
    explicit AdversaryContext(World& w) : world_(w) {}
    const World& world() const { return world_; }
    ProcSet byzantine() const;
    std::mt19937_64& rng();
    std::uint64_t step() const;
    // Throws ForgedSender when `as` is well-behaved.
    void send(ProcessId as, ProcessId dst, Msg m);
    void tob_broadcast(ProcessId as, Msg m);
    // Throws ForgedSigner when `signer` is well-behaved.
    Signature sign(ProcessId signer, const std::string& payload);
    bool verify(const Signature& sig, ProcessId signer, const std::string& payload) const;

private:
    World& world_;
};

class Adversary {
public:
    virtual ~Adversary() = default;
    virtual std::string name() const = 0;
    virtual void on_start(AdversaryContext&) {}
    // Any envelope (message, request, tob delivery) addressed to a Byzantine id.
    virtual void on_deliver(AdversaryContext&, const Envelope&) {}
};

using Probe = std::function<std::optional<std::string>(const World&)>;

class World {
public:
    World(Attack attack, SchedulePolicy policy, std::uint64_t step_cap = kDefaultStepCap);
    ~World();
    World(const World&) = delete;
    World& operator=(const World&) = delete;

    void add_node(ProcessId p, std::unique_ptr<Node> node);
    void set_adversary(std::unique_ptr<Adversary> adversary);
    void set_tob_liveness(TobLiveness mode, ProcSet outlived = {});
    void set_record_trace(bool on) { record_trace_ = on; }
    // The request becomes deliverable once the step counter reaches `at`.
    void inject_request(ProcessId node, Msg request, std::uint64_t at = 0);
    void add_probe(std::string name, Probe probe);
    void add_final_probe(std::string name, Probe probe);

    RunResult run();

    const Attack& attack() const { return attack_; }
    std::uint64_t step() const { return step_; }
    ProcSet node_ids() const { return node_ids_; }
    Node* node(ProcessId p) const;
    template <typename T>
    const T& node_as(ProcessId p) const {
        return dynamic_cast<const T&>(*node(p));
    }
    const std::vector<Response>& responses() const { return responses_; }
    ProcSet responded(const std::vector<std::string>& kinds) const;
    const std::vector<Envelope>& pending() const { return pending_; }
    const Adversary* adversary() const { return adversary_.get(); }

private:
    friend class Context;
    friend class AdversaryContext;

    void enqueue(ProcessId src, ProcessId dst, Channel ch, Msg m, std::uint64_t due = 0);
    void tob(ProcessId src, Msg m);
    Signature sign_as(ProcessId signer, const std::string& payload);
    bool verify_sig(const Signature& sig, ProcessId signer, const std::string& payload) const;
    void respond(ProcessId node, const std::string& kind, std::int64_t value);
    std::vector<std::size_t> eligible() const;
    std::size_t choose(const std::vector<std::size_t>& eligible);
    void deliver(const Envelope& env);
    void evaluate(const std::vector<std::pair<std::string, Probe>>& probes);
    void log(std::string line);
    bool well_behaved_link(const Envelope& env) const;

    Attack attack_;
    SchedulePolicy policy_;
    std::uint64_t step_cap_;
    std::mt19937_64 sched_rng_;
    std::mt19937_64 adv_rng_;
    std::map<ProcessId, std::unique_ptr<Node>> nodes_;
    ProcSet node_ids_;
    std::unique_ptr<Adversary> adversary_;
    TobLiveness tob_mode_ = TobLiveness::AllWellBehaved;
    ProcSet tob_outlived_;
    bool record_trace_ = true;

    std::vector<Envelope> pending_;
    std::uint64_t next_id_ = 0;
    std::uint64_t step_ = 0;
    std::map<std::pair<ProcessId, ProcessId>, std::uint64_t> link_seq_;
    std::uint64_t tob_seq_ = 0;
    std::map<ProcessId, std::uint64_t> tob_next_;  // next global seq each recipient may deliver
    std::map<ProcessId, std::vector<std::uint64_t>> tob_queue_;
    std::set<std::pair<ProcessId, std::uint64_t>> signatures_;

    std::vector<std::pair<std::string, Probe>> probes_;
    std::vector<std::pair<std::string, Probe>> final_probes_;
    RunResult result_;
    std::vector<Response> responses_;
    bool started_ = false;
};

std::uint64_t fingerprint(const std::string& bytes);

}  // namespace hqs
