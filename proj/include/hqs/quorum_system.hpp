#pragma once

#include <map>
#include <string>
#include <vector>

#include "hqs/types.hpp"

namespace hqs {

struct Attack {
    ProcSet universe;
    ProcSet byzantine;

    static Attack make(ProcSet universe, ProcSet byzantine);
    ProcSet well_behaved() const { return universe - byzantine; }
    bool is_byzantine(ProcessId p) const { return byzantine.contains(p); }
};

using Declarations = std::map<ProcessId, QuorumSet>;

class QuorumSystem {
public:
    QuorumSystem() = default;

    // Validating constructor. Declarations are normalized to antichains.
    // must_declare lists processes that need a nonempty declaration (well-behaved active ones).
    static QuorumSystem make(ProcSet universe, ProcSet active, Declarations decls,
                             ProcSet must_declare = {});
    // Universe defaults to active plus every quorum member.
    static QuorumSystem make(ProcSet active, Declarations decls);
    // No validation beyond normalization; used for protocol snapshots where
    // empty quorum sets are a legitimate post-state.
    static QuorumSystem unchecked(ProcSet universe, ProcSet active, Declarations decls);

    ProcSet universe() const { return universe_; }
    ProcSet active() const { return active_; }
    ProcSet domain() const;
    bool declared(ProcessId p) const { return decls_.count(p) != 0; }
    const QuorumSet& quorums(ProcessId p) const;
    const Declarations& declarations() const { return decls_; }
    std::vector<std::string> warnings() const;

    bool operator==(const QuorumSystem&) const = default;

private:
    ProcSet universe_;
    ProcSet active_;
    Declarations decls_;
};

struct ReconfigOp {
    enum class Kind { Join, Leave, Add, Remove };
    Kind kind;
    ProcessId p;
    ProcSet q;          // Add, Remove
    QuorumSet quorums;  // Join

    static ReconfigOp join(ProcessId p, QuorumSet qs) { return {Kind::Join, p, {}, std::move(qs)}; }
    static ReconfigOp leave(ProcessId p) { return {Kind::Leave, p, {}, {}}; }
    static ReconfigOp add(ProcessId p, ProcSet q) { return {Kind::Add, p, q, {}}; }
    static ReconfigOp remove(ProcessId p, ProcSet q) { return {Kind::Remove, p, q, {}}; }
};

QuorumSet minimal_quorums(const QuorumSystem& qs, const Attack& attack);
bool is_system_quorum(const QuorumSystem& qs, const Attack& attack, ProcSet s);

// P intersects every quorum in Q.
bool blocks(const QuorumSet& Q, ProcSet P);
// (q \ left) intersects P for every quorum q in Q.
bool blocks_active(const QuorumSet& Q, ProcSet P, ProcSet left);

bool is_blocking(const QuorumSystem& qs, ProcessId p, ProcSet P);
bool is_active_blocking(const QuorumSystem& qs, ProcessId p, ProcSet P, ProcSet left);
ProcSet followers(const QuorumSystem& qs, ProcessId p);

QuorumSystem apply_reconfig(const QuorumSystem& qs, const ReconfigOp& op);

}  // namespace hqs
