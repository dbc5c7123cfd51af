#include "hqs/quorum_system.hpp"

#include <algorithm>

namespace hqs {

Attack Attack::make(ProcSet universe, ProcSet byzantine) {
    if (!byzantine.subset_of(universe))
        throw Error(ErrorCode::PreconditionViolated,
                    "byzantine set " + byzantine.str() + " not inside universe " + universe.str());
    return Attack{universe, byzantine};
}

QuorumSystem QuorumSystem::make(ProcSet universe, ProcSet active, Declarations decls,
                                ProcSet must_declare) {
    if (!active.subset_of(universe))
        throw Error(ErrorCode::UnknownMember, "active set " + active.str() + " outside universe");
    for (auto& [p, qs] : decls) {
        if (!active.contains(p))
            throw Error(ErrorCode::PreconditionViolated,
                        "declaration for inactive process " + std::to_string(p));
        if (qs.empty())
            throw Error(ErrorCode::EmptyDeclaration, "process " + std::to_string(p) + " has no quorums");
        for (ProcSet q : qs) {
            if (q.empty())
                throw Error(ErrorCode::EmptyQuorum, "empty quorum declared by " + std::to_string(p));
            if (!q.subset_of(universe))
                throw Error(ErrorCode::UnknownMember,
                            "quorum " + q.str() + " of " + std::to_string(p) + " leaves the universe");
        }
    }
    for (ProcessId p : must_declare & active) {
        if (!decls.count(p))
            throw Error(ErrorCode::EmptyDeclaration, "process " + std::to_string(p) + " has no quorums");
    }
    return unchecked(universe, active, std::move(decls));
}

QuorumSystem QuorumSystem::make(ProcSet active, Declarations decls) {
    ProcSet universe = active;
    for (auto& [p, qs] : decls) universe |= union_of(qs);
    return make(universe, active, std::move(decls));
}

QuorumSystem QuorumSystem::unchecked(ProcSet universe, ProcSet active, Declarations decls) {
    QuorumSystem s;
    s.universe_ = universe;
    s.active_ = active;
    for (auto& [p, qs] : decls) {
        QuorumSet nonempty;
        for (ProcSet q : qs)
            if (!q.empty()) nonempty.push_back(q);
        s.decls_.emplace(p, normalize(std::move(nonempty)));
    }
    return s;
}

ProcSet QuorumSystem::domain() const {
    ProcSet d;
    for (auto& [p, qs] : decls_) d.insert(p);
    return d;
}

const QuorumSet& QuorumSystem::quorums(ProcessId p) const {
    static const QuorumSet kEmpty;
    auto it = decls_.find(p);
    return it == decls_.end() ? kEmpty : it->second;
}

std::vector<std::string> QuorumSystem::warnings() const {
    std::vector<std::string> out;
    for (auto& [p, qs] : decls_)
        for (ProcSet q : qs)
            if (!q.contains(p))
                out.push_back("process " + std::to_string(p) + " is not a member of its quorum " + q.str());
    return out;
}

QuorumSet minimal_quorums(const QuorumSystem& qs, const Attack& attack) {
    QuorumSet all;
    for (auto& [p, Q] : qs.declarations())
        if (!attack.is_byzantine(p)) all.insert(all.end(), Q.begin(), Q.end());
    return normalize(std::move(all));
}

bool is_system_quorum(const QuorumSystem& qs, const Attack& attack, ProcSet s) {
    for (ProcSet m : minimal_quorums(qs, attack))
        if (m.subset_of(s)) return true;
    return false;
}

bool blocks(const QuorumSet& Q, ProcSet P) {
    return std::all_of(Q.begin(), Q.end(), [P](ProcSet q) { return q.intersects(P); });
}

bool blocks_active(const QuorumSet& Q, ProcSet P, ProcSet left) {
    return std::all_of(Q.begin(), Q.end(), [&](ProcSet q) { return (q - left).intersects(P); });
}

static void require_active(const QuorumSystem& qs, ProcessId p) {
    if (!qs.active().contains(p))
        throw Error(ErrorCode::UnknownProcess, "process " + std::to_string(p) + " is not active");
}

bool is_blocking(const QuorumSystem& qs, ProcessId p, ProcSet P) {
    require_active(qs, p);
    return blocks(qs.quorums(p), P);
}

bool is_active_blocking(const QuorumSystem& qs, ProcessId p, ProcSet P, ProcSet left) {
    require_active(qs, p);
    return blocks_active(qs.quorums(p), P, left);
}

ProcSet followers(const QuorumSystem& qs, ProcessId p) {
    ProcSet f;
    for (auto& [x, Q] : qs.declarations())
        if (qs.active().contains(x) && union_of(Q).contains(p)) f.insert(x);
    return f;
}

QuorumSystem apply_reconfig(const QuorumSystem& qs, const ReconfigOp& op) {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::PreconditionViolated, m); };
    ProcSet universe = qs.universe();
    ProcSet active = qs.active();
    Declarations decls = qs.declarations();
    const std::string who = std::to_string(op.p);
    switch (op.kind) {
    case ReconfigOp::Kind::Join:
        if (active.contains(op.p)) fail("join by active process " + who);
        if (op.quorums.empty()) fail("join without quorums by " + who);
        for (ProcSet q : op.quorums) {
            if (q.empty()) fail("join with empty quorum by " + who);
            universe |= q;
        }
        universe.insert(op.p);
        active.insert(op.p);
        decls[op.p] = op.quorums;
        break;
    case ReconfigOp::Kind::Leave:
        if (!active.contains(op.p)) fail("leave by inactive process " + who);
        active.erase(op.p);
        decls.erase(op.p);
        break;
    case ReconfigOp::Kind::Add:
        if (!active.contains(op.p)) fail("add by inactive process " + who);
        if (op.q.empty()) fail("add of empty quorum by " + who);
        universe |= op.q;
        decls[op.p].push_back(op.q);
        break;
    case ReconfigOp::Kind::Remove: {
        auto it = decls.find(op.p);
        if (it == decls.end() || !contains_quorum(it->second, op.q))
            fail("remove of undeclared quorum " + op.q.str() + " by " + who);
        auto& Q = it->second;
        Q.erase(std::find(Q.begin(), Q.end(), op.q));
        break;
    }
    }
    return QuorumSystem::unchecked(universe, active, std::move(decls));
}

}  // namespace hqs
