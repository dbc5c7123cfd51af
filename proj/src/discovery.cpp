#include "hqs/discovery.hpp"

#include <algorithm>

namespace hqs {

ValidQ validq_oracle(QuorumSet minimal) {
    return [mq = std::move(minimal)](ProcSet q) { return !q.empty() && contains_quorum(mq, q); };
}

ValidQ validq_threshold(int k) {
    return [k](ProcSet q) { return !q.empty() && q.size() >= k; };
}

DiscoveryNode::DiscoveryNode(QuorumSet Q, ValidQ validq) : validq_(std::move(validq)) {
    s_.Q = normalize(std::move(Q));
}

void DiscoveryNode::on_message(Context& ctx, const Envelope& env) {
    switch (env.msg.type) {
    case MsgType::ReqDiscover: on_discover(ctx); break;
    case MsgType::Exchange:
        if (env.channel == Channel::Apl) on_exchange(ctx, env.src, env.msg.qs);
        break;
    case MsgType::Extend:
        if (env.channel == Channel::Apl) on_extend(env.src, env.msg.q);
        break;
    default: break;
    }
}

void DiscoveryNode::on_discover(Context& ctx) {
    Msg m;
    m.type = MsgType::Exchange;
    m.qs = s_.Q;
    for (ProcessId p : union_of(s_.Q)) ctx.send(p, m);
}

void DiscoveryNode::on_exchange(Context& ctx, ProcessId from, const QuorumSet& Qp) {
    s_.F.insert(from);
    s_.qmap[from] = normalize(Qp);
    try_phase_one(ctx);
}

// Fires once per distinct own quorum that every member reports verbatim.
void DiscoveryNode::try_phase_one(Context& ctx) {
    for (ProcSet q : s_.Q) {
        if (contains_quorum(s_.extended, q)) continue;
        bool agreed = std::all_of(q.begin(), q.end(), [&](ProcessId p) {
            auto it = s_.qmap.find(p);
            return it != s_.qmap.end() && contains_quorum(it->second, q);
        });
        if (!agreed) continue;
        s_.in_sink = true;
        s_.extended.push_back(q);
        Msg m;
        m.type = MsgType::Extend;
        m.q = q;
        for (ProcessId p : union_of(s_.Q)) ctx.send(p, m);
    }
}

void DiscoveryNode::on_extend(ProcessId from, ProcSet q) {
    s_.ext_senders[q.bits()].insert(from);
    try_accept(q);
}

// Accept Extend(q) once every member of q ∩ q' (for some own q') has sent it.
void DiscoveryNode::try_accept(ProcSet q) {
    if (s_.in_sink || !validq_(q)) return;
    ProcSet senders = s_.ext_senders[q.bits()];
    for (ProcSet own : s_.Q) {
        ProcSet meet = q & own;
        if (!meet.empty() && meet.subset_of(senders)) {
            s_.in_sink = true;
            return;
        }
    }
}

}  // namespace hqs
