#pragma once

#include <map>

#include "hqs/sim.hpp"

namespace hqs {

struct BrbInstance {
    bool echoed = false;
    bool ready_sent = false;
    bool delivered = false;
    std::int64_t delivered_value = 0;
    std::map<std::int64_t, ProcSet> echoes;
    std::map<std::int64_t, ProcSet> readies;
};

// Bracha-style reliable broadcast over asymmetric quorums. Instances are keyed by origin.
class BrbNode : public Node {
public:
    // `everyone` receives the initial Send; echoes and readies go to followers F.
    BrbNode(QuorumSet Q, ProcSet F, ProcSet everyone);
    void on_message(Context& ctx, const Envelope& env) override;
    const std::map<ProcessId, BrbInstance>& instances() const { return inst_; }

private:
    void advance(Context& ctx, ProcessId origin, std::int64_t v);
    bool has_quorum(ProcSet s) const;

    QuorumSet Q_;
    ProcSet F_;
    ProcSet everyone_;
    std::map<ProcessId, BrbInstance> inst_;
    bool broadcast_ = false;
};

}  // namespace hqs
