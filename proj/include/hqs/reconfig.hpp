#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hqs/sim.hpp"

namespace hqs {

enum class LeaveMode { AC, PC };

struct ReconfigConfig {
    LeaveMode mode = LeaveMode::AC;
    // Conservative operation treats every node as a sink member and always coordinates.
    bool in_sink = true;
    // Leave/Remove checks also range over tentative quorums, and Add checks subtract tomb.
    bool combined = true;
    std::uint64_t join_timeout = 2000;
};

using AddKey = std::pair<ProcessId, std::uint64_t>;  // (requester, q_c bits)

std::string commit_payload(ProcessId requester, ProcSet qc);
std::string fail_payload(ProcessId requester, ProcSet qc);

struct ReconfigState {
    enum class Request { None, Leave, Remove, Add, Join };

    QuorumSet Q;
    ProcSet tomb;
    ProcSet F;
    bool active = true;
    bool frozen = false;
    ProcSet left_seen;
    QuorumSet sanctioned;  // declared at start or installed by a completed Add/Join

    Request pending = Request::None;
    ProcSet remove_q;

    // Add, requester side
    ProcSet add_qn, add_ack, add_nack, add_qc;
    bool add_phase2 = false;
    std::map<ProcessId, Signature> add_commits;

    // Add, member side
    std::vector<std::pair<ProcessId, ProcSet>> tentative;
    std::map<AddKey, ProcSet> failed;
    std::set<AddKey> succeeded;
    std::set<AddKey> fail_completed;
    std::set<AddKey> fail_echoed;
    struct Vote {
        ProcSet acks, nacks;
        bool committed = false, aborted = false;
    };
    std::map<AddKey, Vote> votes;

    // Join
    bool joining = false;
    QuorumSet join_S;
    std::map<ProcessId, QuorumSet> join_qmap;
    ProcSet probed;
};

class ReconfigNode : public Node {
public:
    ReconfigNode(QuorumSet Q, ProcSet F, ReconfigConfig cfg, bool active = true);
    void on_message(Context& ctx, const Envelope& env) override;
    bool halted() const override { return s_.frozen; }
    const ReconfigState& state() const { return s_; }
    const ReconfigConfig& config() const { return cfg_; }

private:
    bool begin_request(Context& ctx, ReconfigState::Request r, const char* fail_kind);
    void leave_request(Context& ctx);
    void remove_request(Context& ctx, ProcSet q);
    void on_check(Context& ctx, ProcessId src, const Msg& m);
    void on_left(ProcessId src, ProcessId p);
    void announce_left(Context& ctx);

    void join_request(Context& ctx, ProcSet ps);
    void probe_missing(Context& ctx);
    void on_prob(Context& ctx, ProcessId src);
    void on_quorums(Context& ctx, ProcessId src, const QuorumSet& Qp);
    void on_timer(Context& ctx);

    void add_request(Context& ctx, ProcSet qn);
    void on_inclusion(Context& ctx, ProcessId src, ProcSet qn);
    void on_inclusion_reply(Context& ctx, ProcessId src, ProcSet qn, bool ack);
    void on_checkadd(Context& ctx, ProcessId src, ProcessId requester, ProcSet qc);
    void on_addcheck(Context& ctx, ProcessId src, const Msg& m);
    void on_check_vote(Context& ctx, ProcessId src, ProcessId requester, ProcSet qc, bool ack);
    void on_commit(Context& ctx, ProcessId src, const Msg& m);
    void on_abort(Context& ctx, ProcessId src, ProcSet qc);
    void on_success(Context& ctx, const Msg& m);
    void on_fail(Context& ctx, ProcessId src, const Msg& m);

    void install(ProcSet q);
    void drop_tentative(ProcessId requester, ProcSet qc);
    QuorumSet tentative_quorums() const;

    ReconfigState s_;
    ReconfigConfig cfg_;
};

}  // namespace hqs
