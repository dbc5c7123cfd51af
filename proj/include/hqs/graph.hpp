#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "hqs/quorum_system.hpp"

namespace hqs {

struct QuorumGraph {
    ProcSet vertices;
    std::array<ProcSet, kMaxProcesses> succ{};  // succ[p] = {p' | (p, p') is an edge}

    bool has_edge(ProcessId a, ProcessId b) const { return succ[a].contains(b); }
    std::vector<std::pair<ProcessId, ProcessId>> edges() const;
};

struct Condensation {
    std::vector<ProcSet> components;                 // ordered by least member
    std::vector<std::pair<int, int>> dag_edges;      // sorted, no self-loops
    int component_of(ProcessId p) const;
};

// Vertices are the active processes plus every quorum member; Byzantine
// declarations contribute edges like any other.
QuorumGraph build_graph(const QuorumSystem& qs);
Condensation condense(const QuorumGraph& g);
std::vector<ProcSet> sink_components(const Condensation& c);

bool in_sink(const QuorumSystem& qs, const Attack& attack, ProcessId p);
ProcSet sink_members(const QuorumSystem& qs);
ProcSet well_behaved_sink_members(const QuorumSystem& qs, const Attack& attack);

// Requires consistency at the well-behaved set and quorum sharing; throws
// PreconditionNotVerified otherwise.
bool is_min_quorum_by_agreement(const QuorumSystem& qs, const Attack& attack, ProcSet q);

struct DotOptions {
    std::vector<std::string> labels;  // optional id -> label table
};
std::string to_dot(const QuorumSystem& qs, const Attack& attack, const DotOptions& opts = {});

}  // namespace hqs
