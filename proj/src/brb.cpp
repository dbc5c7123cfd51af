#include "hqs/brb.hpp"

#include <algorithm>

namespace hqs {

BrbNode::BrbNode(QuorumSet Q, ProcSet F, ProcSet everyone)
    : Q_(normalize(std::move(Q))), F_(F), everyone_(everyone) {}

bool BrbNode::has_quorum(ProcSet s) const {
    return std::any_of(Q_.begin(), Q_.end(), [s](ProcSet q) { return q.subset_of(s); });
}

void BrbNode::on_message(Context& ctx, const Envelope& env) {
    const Msg& m = env.msg;
    if (m.type == MsgType::ReqBroadcast) {
        if (broadcast_) {
            ctx.respond("DuplicateInstance");
            return;
        }
        broadcast_ = true;
        Msg s;
        s.type = MsgType::BrbSend;
        s.a = ctx.self();
        s.value = m.value;
        for (ProcessId p : everyone_) ctx.send(p, s);
        return;
    }
    if (env.channel != Channel::Apl) return;
    switch (m.type) {
    case MsgType::BrbSend: {
        if (m.a != env.src) return;
        BrbInstance& in = inst_[m.a];
        if (in.echoed) return;
        in.echoed = true;
        Msg e = m;
        e.type = MsgType::BrbEcho;
        for (ProcessId p : F_) ctx.send(p, e);
        return;
    }
    case MsgType::BrbEcho: inst_[m.a].echoes[m.value].insert(env.src); break;
    case MsgType::BrbReady: inst_[m.a].readies[m.value].insert(env.src); break;
    default: return;
    }
    advance(ctx, m.a, m.value);
}

void BrbNode::advance(Context& ctx, ProcessId origin, std::int64_t v) {
    BrbInstance& in = inst_[origin];
    if (!in.ready_sent && (has_quorum(in.echoes[v]) || blocks(Q_, in.readies[v]))) {
        in.ready_sent = true;
        Msg r;
        r.type = MsgType::BrbReady;
        r.a = origin;
        r.value = v;
        for (ProcessId p : F_) ctx.send(p, r);
    }
    if (!in.delivered && has_quorum(in.readies[v])) {
        in.delivered = true;
        in.delivered_value = v;
        ctx.respond("Deliver", v);
    }
}

}  // namespace hqs
