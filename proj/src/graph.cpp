#include "hqs/graph.hpp"

#include <algorithm>
#include <sstream>

#include "hqs/props.hpp"

namespace hqs {

std::vector<std::pair<ProcessId, ProcessId>> QuorumGraph::edges() const {
    std::vector<std::pair<ProcessId, ProcessId>> out;
    for (ProcessId a : vertices)
        for (ProcessId b : succ[a]) out.emplace_back(a, b);
    return out;
}

int Condensation::component_of(ProcessId p) const {
    for (std::size_t i = 0; i < components.size(); ++i)
        if (components[i].contains(p)) return static_cast<int>(i);
    return -1;
}

QuorumGraph build_graph(const QuorumSystem& qs) {
    QuorumGraph g;
    g.vertices = qs.active();
    for (auto& [p, Q] : qs.declarations()) {
        ProcSet u = union_of(Q);
        g.vertices |= u;
        g.vertices.insert(p);
        g.succ[p] |= u;
    }
    return g;
}

namespace {

// Iterative Tarjan; recursion depth is bounded by 64 anyway but the explicit
// stack keeps the frame layout obvious.
struct Tarjan {
    const QuorumGraph& g;
    std::array<int, kMaxProcesses> index{};
    std::array<int, kMaxProcesses> low{};
    std::array<bool, kMaxProcesses> on_stack{};
    std::vector<ProcessId> stack;
    std::vector<ProcSet> sccs;
    int counter = 0;

    explicit Tarjan(const QuorumGraph& graph) : g(graph) { index.fill(-1); }

    void visit(ProcessId root) {
        struct Frame {
            ProcessId v;
            ProcSet rest;
        };
        std::vector<Frame> frames;
        auto open = [&](ProcessId v) {
            index[v] = low[v] = counter++;
            stack.push_back(v);
            on_stack[v] = true;
            frames.push_back({v, g.succ[v] & g.vertices});
        };
        open(root);
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (!f.rest.empty()) {
                ProcessId w = f.rest.min();
                f.rest.erase(w);
                if (index[w] == -1) {
                    open(w);
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            ProcessId v = f.v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            if (low[v] == index[v]) {
                ProcSet comp;
                ProcessId w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.insert(w);
                } while (w != v);
                sccs.push_back(comp);
            }
        }
    }
};

}  // namespace

Condensation condense(const QuorumGraph& g) {
    Tarjan t(g);
    for (ProcessId v : g.vertices)
        if (t.index[v] == -1) t.visit(v);
    Condensation c;
    c.components = std::move(t.sccs);
    std::sort(c.components.begin(), c.components.end(),
              [](ProcSet a, ProcSet b) { return a.min() < b.min(); });
    std::vector<int> comp_of(kMaxProcesses, -1);
    for (std::size_t i = 0; i < c.components.size(); ++i)
        for (ProcessId p : c.components[i]) comp_of[p] = static_cast<int>(i);
    for (ProcessId a : g.vertices)
        for (ProcessId b : g.succ[a] & g.vertices)
            if (comp_of[a] != comp_of[b]) c.dag_edges.emplace_back(comp_of[a], comp_of[b]);
    std::sort(c.dag_edges.begin(), c.dag_edges.end());
    c.dag_edges.erase(std::unique(c.dag_edges.begin(), c.dag_edges.end()), c.dag_edges.end());
    return c;
}

std::vector<ProcSet> sink_components(const Condensation& c) {
    std::vector<bool> has_out(c.components.size(), false);
    for (auto [a, b] : c.dag_edges) has_out[a] = true;
    std::vector<ProcSet> out;
    for (std::size_t i = 0; i < c.components.size(); ++i)
        if (!has_out[i]) out.push_back(c.components[i]);
    return out;
}

ProcSet sink_members(const QuorumSystem& qs) {
    ProcSet s;
    for (ProcSet c : sink_components(condense(build_graph(qs)))) s |= c;
    return s;
}

bool in_sink(const QuorumSystem& qs, const Attack& attack, ProcessId p) {
    (void)attack;
    if (!build_graph(qs).vertices.contains(p))
        throw Error(ErrorCode::UnknownProcess, "process " + std::to_string(p) + " is not in the graph");
    return sink_members(qs).contains(p);
}

ProcSet well_behaved_sink_members(const QuorumSystem& qs, const Attack& attack) {
    return sink_members(qs) & attack.well_behaved();
}

bool is_min_quorum_by_agreement(const QuorumSystem& qs, const Attack& attack, ProcSet q) {
    ProcSet W = attack.well_behaved();
    PropertyReport cons = check_consistency(qs, attack, W);
    PropertyReport share = check_quorum_sharing(qs);
    if (!cons.holds || !share.holds)
        throw Error(ErrorCode::PreconditionNotVerified,
                    (cons.holds ? share : cons).describe());
    for (ProcessId m : q & W)
        if (!contains_quorum(qs.quorums(m), q)) return false;
    return true;
}

std::string to_dot(const QuorumSystem& qs, const Attack& attack, const DotOptions& opts) {
    QuorumGraph g = build_graph(qs);
    ProcSet sink = sink_members(qs);
    auto label = [&](ProcessId p) {
        if (p < static_cast<int>(opts.labels.size()) && !opts.labels[p].empty()) return opts.labels[p];
        return std::to_string(p);
    };
    std::ostringstream out;
    out << "digraph quorum_graph {\n";
    for (ProcessId v : g.vertices) {
        std::vector<std::string> style;
        if (attack.is_byzantine(v)) style.push_back("dashed");
        if (sink.contains(v)) style.push_back("filled");
        out << "  \"" << label(v) << "\"";
        if (!style.empty()) {
            out << " [style=\"";
            for (std::size_t i = 0; i < style.size(); ++i) out << (i ? "," : "") << style[i];
            out << "\"";
            if (sink.contains(v)) out << ", fillcolor=\"palegreen\"";
            out << "]";
        }
        out << ";\n";
    }
    for (auto [a, b] : g.edges()) out << "  \"" << label(a) << "\" -> \"" << label(b) << "\";\n";
    out << "}\n";
    return out.str();
}

}  // namespace hqs
