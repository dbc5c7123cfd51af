#pragma once

#include <functional>
#include <map>

#include "hqs/sim.hpp"

namespace hqs {

// Deployment check applied to a quorum carried by an Extend message.
using ValidQ = std::function<bool(ProcSet)>;

// Accepts exactly the minimal quorums of the true system.
ValidQ validq_oracle(QuorumSet minimal);
// Accepts any quorum with at least k members.
ValidQ validq_threshold(int k);

struct DiscoveryState {
    QuorumSet Q;
    std::map<ProcessId, QuorumSet> qmap;
    bool in_sink = false;
    ProcSet F;
    QuorumSet extended;                           // quorums this node sent Extend for
    std::map<std::uint64_t, ProcSet> ext_senders;  // quorum bits -> senders of Extend(q)
};

class DiscoveryNode : public Node {
public:
    DiscoveryNode(QuorumSet Q, ValidQ validq);
    void on_message(Context& ctx, const Envelope& env) override;
    const DiscoveryState& state() const { return s_; }

private:
    void on_discover(Context& ctx);
    void on_exchange(Context& ctx, ProcessId from, const QuorumSet& Qp);
    void on_extend(ProcessId from, ProcSet q);
    void try_phase_one(Context& ctx);
    void try_accept(ProcSet q);

    DiscoveryState s_;
    ValidQ validq_;
};

}  // namespace hqs
