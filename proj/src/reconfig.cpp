#include "hqs/reconfig.hpp"

#include <algorithm>

namespace hqs {

using Request = ReconfigState::Request;

std::string commit_payload(ProcessId requester, ProcSet qc) {
    return "Commit|" + std::to_string(requester) + "|" + qc.str();
}

std::string fail_payload(ProcessId requester, ProcSet qc) {
    return "Fail|" + std::to_string(requester) + "|" + qc.str();
}

static Msg make(MsgType t, ProcessId a = kNoProcess, ProcSet q = {}) {
    Msg m;
    m.type = t;
    m.a = a;
    m.q = q;
    return m;
}

static AddKey key_of(ProcessId requester, ProcSet qc) { return {requester, qc.bits()}; }

// (q1 ∩ q2) \ removed blocks Q for every pair drawn from `pairs`.
static bool pairwise_blocking(const QuorumSet& pairs, const QuorumSet& Q, ProcSet removed) {
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = i; j < pairs.size(); ++j)
            if (!blocks(Q, (pairs[i] & pairs[j]) - removed)) return false;
    return true;
}

ReconfigNode::ReconfigNode(QuorumSet Q, ProcSet F, ReconfigConfig cfg, bool active) : cfg_(cfg) {
    s_.Q = normalize(std::move(Q));
    s_.F = F;
    s_.active = active;
    s_.sanctioned = s_.Q;
}

void ReconfigNode::on_message(Context& ctx, const Envelope& env) {
    const Msg& m = env.msg;
    const bool apl = env.channel == Channel::Apl;
    switch (m.type) {
    case MsgType::ReqLeave: leave_request(ctx); break;
    case MsgType::ReqRemove: remove_request(ctx, m.q); break;
    case MsgType::ReqAdd: add_request(ctx, m.q); break;
    case MsgType::ReqJoin: join_request(ctx, m.q); break;
    case MsgType::Check:
        if (env.channel == Channel::Tob) on_check(ctx, env.src, m);
        break;
    case MsgType::Left:
        if (apl) on_left(env.src, m.a);
        break;
    case MsgType::Prob:
        if (apl) on_prob(ctx, env.src);
        break;
    case MsgType::Quorums:
        if (apl) on_quorums(ctx, env.src, m.qs);
        break;
    case MsgType::Timer: on_timer(ctx); break;
    case MsgType::Inclusion:
        if (apl) on_inclusion(ctx, env.src, m.q);
        break;
    case MsgType::AckInclusion:
    case MsgType::NackInclusion:
        if (apl) on_inclusion_reply(ctx, env.src, m.q, m.type == MsgType::AckInclusion);
        break;
    case MsgType::CheckAdd:
        if (apl) on_checkadd(ctx, env.src, m.a, m.q);
        break;
    case MsgType::AddCheck:
        if (apl) on_addcheck(ctx, env.src, m);
        break;
    case MsgType::CheckAck:
    case MsgType::CheckNack:
        if (apl) on_check_vote(ctx, env.src, m.a, m.q, m.type == MsgType::CheckAck);
        break;
    case MsgType::Commit:
        if (apl) on_commit(ctx, env.src, m);
        break;
    case MsgType::Abort:
        if (apl) on_abort(ctx, env.src, m.q);
        break;
    case MsgType::Success:
        if (apl) on_success(ctx, m);
        break;
    case MsgType::Fail:
        if (apl) on_fail(ctx, env.src, m);
        break;
    default: break;
    }
}

bool ReconfigNode::begin_request(Context& ctx, Request r, const char* fail_kind) {
    if (s_.pending != Request::None) {
        ctx.respond("Busy");
        return false;
    }
    if (!s_.active) {
        ctx.respond(fail_kind);
        return false;
    }
    s_.pending = r;
    return true;
}

// ---------------------------------------------------------------- leave/remove

void ReconfigNode::announce_left(Context& ctx) {
    for (ProcessId p : s_.F - ProcSet::single(ctx.self())) ctx.send(p, make(MsgType::Left, ctx.self()));
}

void ReconfigNode::leave_request(Context& ctx) {
    if (!begin_request(ctx, Request::Leave, "LeaveFail")) return;
    const ProcSet self = ProcSet::single(ctx.self());
    if (cfg_.mode == LeaveMode::PC || !cfg_.in_sink) {
        if (cfg_.mode == LeaveMode::PC) announce_left(ctx);
        ctx.respond("LeaveComplete");
        if (cfg_.mode == LeaveMode::AC) announce_left(ctx);
        s_.pending = Request::None;
        s_.active = false;
        s_.frozen = true;
        return;
    }
    if (!pairwise_blocking(s_.Q, s_.Q, self)) {
        s_.pending = Request::None;
        ctx.respond("LeaveFail");
        return;
    }
    Msg m = make(MsgType::Check, ctx.self());
    m.qs = s_.Q;
    ctx.tob_broadcast(m);
}

void ReconfigNode::remove_request(Context& ctx, ProcSet q) {
    if (!begin_request(ctx, Request::Remove, "RemoveFail")) return;
    if (!contains_quorum(s_.Q, q)) {
        s_.pending = Request::None;
        ctx.respond("RemoveFail");
        return;
    }
    if (cfg_.mode == LeaveMode::PC) {
        s_.Q.erase(std::find(s_.Q.begin(), s_.Q.end(), q));
        s_.pending = Request::None;
        ctx.respond("RemoveComplete");
        return;
    }
    if (!cfg_.in_sink) {
        s_.Q.erase(std::find(s_.Q.begin(), s_.Q.end(), q));
        s_.pending = Request::None;
        ctx.respond("RemoveComplete");
        announce_left(ctx);
        return;
    }
    // The remover joins the left set, so it is checked like a leaver over all
    // of Q. Dropping the last quorum is refused outright.
    const ProcSet self = ProcSet::single(ctx.self());
    if (s_.Q.size() < 2 || !pairwise_blocking(s_.Q, s_.Q, self)) {
        s_.pending = Request::None;
        ctx.respond("RemoveFail");
        return;
    }
    s_.remove_q = q;
    Msg m = make(MsgType::Check, ctx.self(), q);
    m.qs = s_.Q;
    m.flag = true;
    ctx.tob_broadcast(m);
}

void ReconfigNode::on_check(Context& ctx, ProcessId src, const Msg& m) {
    if (cfg_.mode != LeaveMode::AC || m.a != src) return;
    const ProcessId leaver = m.a;
    QuorumSet pairs = m.qs;
    if (cfg_.combined) {
        QuorumSet t = tentative_quorums();
        pairs.insert(pairs.end(), t.begin(), t.end());
    }
    const bool ok = pairwise_blocking(pairs, m.qs, ProcSet::single(leaver) | s_.tomb);
    const bool mine = leaver == ctx.self() &&
                      s_.pending == (m.flag ? Request::Remove : Request::Leave);
    if (!ok) {
        if (mine) {
            s_.pending = Request::None;
            ctx.respond(m.flag ? "RemoveFail" : "LeaveFail");
        }
        return;
    }
    s_.tomb.insert(leaver);
    if (!mine) return;
    s_.pending = Request::None;
    if (m.flag) {
        ctx.respond("RemoveComplete");
        // The quorum may have shrunk through Left messages since the request.
        ProcSet target = m.q - s_.left_seen;
        auto it = std::find_if(s_.Q.begin(), s_.Q.end(),
                               [&](ProcSet q) { return q == m.q || q == target; });
        if (it != s_.Q.end()) s_.Q.erase(it);
        announce_left(ctx);
    } else {
        ctx.respond("LeaveComplete");
        announce_left(ctx);
        s_.active = false;
        s_.frozen = true;
    }
}

void ReconfigNode::on_left(ProcessId src, ProcessId p) {
    if (p != src) return;
    s_.left_seen.insert(p);
    QuorumSet next;
    for (ProcSet q : s_.Q) {
        if (cfg_.mode == LeaveMode::PC) {
            if (!q.contains(p)) next.push_back(q);
        } else {
            q.erase(p);
            if (!q.empty()) next.push_back(q);
        }
    }
    s_.Q = normalize(std::move(next));
}

// ------------------------------------------------------------------------ join

void ReconfigNode::join_request(Context& ctx, ProcSet ps) {
    if (s_.pending != Request::None) {
        ctx.respond("Busy");
        return;
    }
    if (s_.active || ps.empty()) {
        ctx.respond("Rejected");
        return;
    }
    s_.pending = Request::Join;
    s_.joining = true;
    s_.join_S = {ps};
    s_.join_qmap.clear();
    s_.probed = {};
    ctx.set_timer(cfg_.join_timeout, make(MsgType::Timer));
    probe_missing(ctx);
}

void ReconfigNode::probe_missing(Context& ctx) {
    for (ProcSet q : s_.join_S)
        for (ProcessId p : q)
            if (!s_.join_qmap.count(p) && !s_.probed.contains(p)) {
                s_.probed.insert(p);
                ctx.send(p, make(MsgType::Prob));
            }
}

void ReconfigNode::on_prob(Context& ctx, ProcessId src) {
    s_.F.insert(src);
    Msg m = make(MsgType::Quorums);
    m.qs = s_.Q;
    if (m.qs.empty() && s_.joining) m.qs = {ProcSet::single(ctx.self())};
    ctx.send(src, m);
}

void ReconfigNode::on_quorums(Context& ctx, ProcessId src, const QuorumSet& Qp) {
    if (!s_.joining) return;
    s_.join_qmap[src] = normalize(Qp);
    QuorumSet next;
    for (ProcSet q : s_.join_S) {
        if (!q.contains(src) || Qp.empty()) {
            next.push_back(q);
            continue;
        }
        for (ProcSet qp : Qp) next.push_back(q | qp);
    }
    std::sort(next.begin(), next.end(), CanonicalLess{});
    next.erase(std::unique(next.begin(), next.end()), next.end());
    s_.join_S = std::move(next);
    probe_missing(ctx);

    bool fixpoint = std::all_of(s_.join_S.begin(), s_.join_S.end(), [&](ProcSet q) {
        return std::all_of(q.begin(), q.end(), [&](ProcessId p) {
            auto it = s_.join_qmap.find(p);
            if (it == s_.join_qmap.end()) return false;
            return std::any_of(it->second.begin(), it->second.end(), [q](ProcSet c) { return c.subset_of(q); });
        });
    });
    if (!fixpoint) return;
    s_.Q = normalize(s_.join_S);
    s_.sanctioned = s_.Q;
    s_.active = true;
    s_.joining = false;
    s_.pending = Request::None;
    ctx.respond("JoinComplete");
}

void ReconfigNode::on_timer(Context& ctx) {
    if (!s_.joining) return;
    s_.joining = false;
    s_.pending = Request::None;
    ctx.respond("JoinTimeout");
}

// ------------------------------------------------------------------------- add

void ReconfigNode::install(ProcSet q) {
    s_.Q.push_back(q);
    s_.Q = normalize(std::move(s_.Q));
    if (!contains_quorum(s_.sanctioned, q)) s_.sanctioned.push_back(q);
}

void ReconfigNode::drop_tentative(ProcessId requester, ProcSet qc) {
    auto& t = s_.tentative;
    t.erase(std::remove(t.begin(), t.end(), std::make_pair(requester, qc)), t.end());
}

QuorumSet ReconfigNode::tentative_quorums() const {
    QuorumSet out;
    for (auto& [p, q] : s_.tentative) out.push_back(q);
    return out;
}

void ReconfigNode::add_request(Context& ctx, ProcSet qn) {
    if (!begin_request(ctx, Request::Add, "AddFail")) return;
    if (qn.empty()) {
        s_.pending = Request::None;
        ctx.respond("AddFail");
        return;
    }
    s_.add_qn = qn;
    s_.add_ack = s_.add_nack = s_.add_qc = {};
    s_.add_phase2 = false;
    s_.add_commits.clear();
    for (ProcessId p : qn) ctx.send(p, make(MsgType::Inclusion, kNoProcess, qn));
}

void ReconfigNode::on_inclusion(Context& ctx, ProcessId src, ProcSet qn) {
    bool included = std::any_of(s_.Q.begin(), s_.Q.end(), [qn](ProcSet q) { return q.subset_of(qn); });
    ctx.send(src, make(included ? MsgType::AckInclusion : MsgType::NackInclusion, kNoProcess, qn));
}

void ReconfigNode::on_inclusion_reply(Context& ctx, ProcessId src, ProcSet qn, bool ack) {
    if (s_.pending != Request::Add || s_.add_phase2 || qn != s_.add_qn || !qn.contains(src)) return;
    (ack ? s_.add_ack : s_.add_nack).insert(src);
    if ((s_.add_ack | s_.add_nack) != qn) return;
    if (s_.add_nack.empty()) {
        install(qn);
        s_.pending = Request::None;
        ctx.respond("AddComplete");
        return;
    }
    s_.add_phase2 = true;
    s_.add_qc = s_.add_nack;
    for (ProcessId p : s_.add_qc) ctx.send(p, make(MsgType::CheckAdd, ctx.self(), s_.add_qc));
}

void ReconfigNode::on_checkadd(Context& ctx, ProcessId src, ProcessId requester, ProcSet qc) {
    if (src != requester || !qc.contains(ctx.self())) return;
    auto entry = std::make_pair(requester, qc);
    if (std::find(s_.tentative.begin(), s_.tentative.end(), entry) == s_.tentative.end())
        s_.tentative.push_back(entry);
    s_.votes.try_emplace(key_of(requester, qc));
    Msg m = make(MsgType::AddCheck, requester, qc);
    m.b = ctx.self();
    for (ProcessId p : union_of(s_.Q)) ctx.send(p, m);
}

void ReconfigNode::on_addcheck(Context& ctx, ProcessId src, const Msg& m) {
    if (m.b != src) return;
    QuorumSet against = tentative_quorums();
    against.insert(against.end(), s_.Q.begin(), s_.Q.end());
    ProcSet removed = cfg_.combined ? s_.tomb : ProcSet{};
    bool ok = std::all_of(against.begin(), against.end(),
                          [&](ProcSet q) { return blocks(s_.Q, (m.q & q) - removed); });
    ctx.send(src, make(ok ? MsgType::CheckAck : MsgType::CheckNack, m.a, m.q));
}

void ReconfigNode::on_check_vote(Context& ctx, ProcessId src, ProcessId requester, ProcSet qc, bool ack) {
    auto it = s_.votes.find(key_of(requester, qc));
    if (it == s_.votes.end()) return;
    auto& v = it->second;
    if (ack) {
        v.acks.insert(src);
        bool quorum = std::any_of(s_.Q.begin(), s_.Q.end(), [&](ProcSet q) { return q.subset_of(v.acks); });
        if (quorum && !v.committed) {
            v.committed = true;
            Msg m = make(MsgType::Commit, requester, qc);
            m.sigs = {ctx.sign(commit_payload(requester, qc))};
            ctx.send(requester, m);
        }
    } else {
        v.nacks.insert(src);
        if (blocks(s_.Q, v.nacks) && !v.aborted) {
            v.aborted = true;
            ctx.send(requester, make(MsgType::Abort, requester, qc));
        }
    }
}

void ReconfigNode::on_commit(Context& ctx, ProcessId src, const Msg& m) {
    if (s_.pending != Request::Add || !s_.add_phase2 || m.q != s_.add_qc || !m.q.contains(src)) return;
    if (m.sigs.size() != 1 || !ctx.verify(m.sigs[0], src, commit_payload(ctx.self(), m.q))) return;
    s_.add_commits[src] = m.sigs[0];
    if (static_cast<int>(s_.add_commits.size()) != s_.add_qc.size()) return;
    install(s_.add_qn);
    Msg done = make(MsgType::Success, ctx.self(), s_.add_qc);
    for (auto& [p, sig] : s_.add_commits) done.sigs.push_back(sig);
    for (ProcessId p : s_.add_qc) ctx.send(p, done);
    s_.pending = Request::None;
    ctx.respond("AddComplete");
}

void ReconfigNode::on_abort(Context& ctx, ProcessId src, ProcSet qc) {
    if (s_.pending != Request::Add || !s_.add_phase2 || qc != s_.add_qc || !qc.contains(src)) return;
    Msg f = make(MsgType::Fail, ctx.self(), qc);
    f.sigs = {ctx.sign(fail_payload(ctx.self(), qc))};
    for (ProcessId p : qc) ctx.send(p, f);
    s_.pending = Request::None;
    ctx.respond("AddFail");
}

void ReconfigNode::on_success(Context& ctx, const Msg& m) {
    AddKey key = key_of(m.a, m.q);
    if (s_.succeeded.count(key) || m.q.empty()) return;
    const std::string payload = commit_payload(m.a, m.q);
    for (ProcessId member : m.q) {
        bool signed_by = std::any_of(m.sigs.begin(), m.sigs.end(), [&](const Signature& s) {
            return ctx.verify(s, member, payload);
        });
        if (!signed_by) return;
    }
    s_.succeeded.insert(key);
    for (ProcessId p : m.q) ctx.send(p, m);
    install(m.q);
    drop_tentative(m.a, m.q);
}

void ReconfigNode::on_fail(Context& ctx, ProcessId src, const Msg& m) {
    AddKey key = key_of(m.a, m.q);
    if (s_.succeeded.count(key)) return;
    if (m.sigs.size() != 1 || !ctx.verify(m.sigs[0], m.a, fail_payload(m.a, m.q))) return;
    if (src == m.a && s_.fail_echoed.insert(key).second)
        for (ProcessId p : m.q) ctx.send(p, m);
    ProcSet& f = s_.failed[key];
    f.insert(src);
    if (m.q.subset_of(f)) {
        drop_tentative(m.a, m.q);
        s_.fail_completed.insert(key);
    }
}

}  // namespace hqs
