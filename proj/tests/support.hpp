#pragma once

// Hand-rolled generators and brute-force oracles shared by the test binaries.
// Oracles deliberately avoid the library's checkers.

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hqs/io.hpp"
#include "hqs/props.hpp"
#include "hqs/quorum_system.hpp"

#ifndef HQS_SOURCE_DIR
#define HQS_SOURCE_DIR "."
#endif

namespace hqs::testing {

using Rng = std::mt19937_64;

inline std::string source_path(const std::string& rel) { return std::string(HQS_SOURCE_DIR) + "/" + rel; }
inline SystemFile fixture(const std::string& name) { return load_system(source_path("fixtures/" + name + ".json")); }

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline ProcSet random_subset(Rng& rng, ProcSet from, double p = 0.5) {
    ProcSet s;
    for (ProcessId x : from)
        if (coin(rng, p)) s.insert(x);
    return s;
}

inline ProcessId random_member(Rng& rng, ProcSet s) {
    auto m = s.members();
    return m[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(m.size()) - 1))];
}

inline ProcSet range_set(int lo, int hi) {
    ProcSet s;
    for (int i = lo; i <= hi; ++i) s.insert(i);
    return s;
}

struct Generated {
    QuorumSystem qs;
    Attack attack;
    ProcSet outlived;
};

// ---------------------------------------------------------------- oracles

// Set-of-ints view, so the oracles do not lean on ProcSet algebra.
using IntSet = std::set<int>;

inline IntSet as_ints(ProcSet s) {
    auto m = s.members();
    return IntSet(m.begin(), m.end());
}

inline bool meets(const IntSet& a, const IntSet& b, const IntSet& c) {
    for (int x : a)
        if (b.count(x) && c.count(x)) return true;
    return false;
}

inline bool within(const IntSet& a, const IntSet& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

inline std::vector<IntSet> decl_of(const QuorumSystem& qs, ProcessId p) {
    std::vector<IntSet> out;
    if (!qs.declared(p)) return out;
    for (ProcSet q : qs.quorums(p)) out.push_back(as_ints(q));
    return out;
}

inline std::vector<int> wb_declared(const QuorumSystem& qs, const Attack& a) {
    std::vector<int> out;
    for (auto& [p, Q] : qs.declarations())
        if (!a.is_byzantine(p)) out.push_back(p);
    return out;
}

// Minimal elements of the upward closure of well-behaved declarations, found by
// enumerating every subset of the universe.
inline std::set<IntSet> oracle_mq(const QuorumSystem& qs, const Attack& a) {
    std::vector<IntSet> decls;
    for (int p : wb_declared(qs, a))
        for (auto& q : decl_of(qs, p)) decls.push_back(q);
    auto members = qs.universe().members();
    const std::size_t n = members.size();
    auto is_quorum = [&](const IntSet& s) {
        return std::any_of(decls.begin(), decls.end(), [&](const IntSet& q) { return within(q, s); });
    };
    std::set<IntSet> out;
    for (std::uint64_t mask = 1; mask < (1ull << n); ++mask) {
        IntSet s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1) s.insert(members[i]);
        if (!is_quorum(s)) continue;
        bool minimal = true;
        for (int x : s) {
            IntSet t = s;
            t.erase(x);
            if (is_quorum(t)) minimal = false;
        }
        if (minimal) out.insert(s);
    }
    return out;
}

inline bool oracle_consistent(const QuorumSystem& qs, const Attack& a, ProcSet at) {
    IntSet P = as_ints(at);
    for (int p : wb_declared(qs, a))
        for (int p2 : wb_declared(qs, a))
            for (auto& q1 : decl_of(qs, p))
                for (auto& q2 : decl_of(qs, p2))
                    if (!meets(q1, q2, P)) return false;
    return true;
}

inline bool oracle_sharing(const QuorumSystem& qs) {
    for (auto& [p, Q] : qs.declarations())
        for (ProcSet qb : Q) {
            IntSet q = as_ints(qb);
            for (int m : q) {
                auto Qm = decl_of(qs, m);
                if (std::none_of(Qm.begin(), Qm.end(), [&](const IntSet& x) { return within(x, q); })) return false;
            }
        }
    return true;
}

inline bool oracle_available(const QuorumSystem& qs, ProcSet for_P, ProcSet at) {
    IntSet A = as_ints(at);
    for (int p : as_ints(for_P)) {
        auto Q = decl_of(qs, p);
        if (std::none_of(Q.begin(), Q.end(), [&](const IntSet& q) { return within(q, A); })) return false;
    }
    return true;
}

inline bool oracle_inclusion(const QuorumSystem& qs, const Attack& a, ProcSet P) {
    IntSet W = as_ints(a.well_behaved());
    for (int p : wb_declared(qs, a))
        for (auto& q : decl_of(qs, p))
            for (int m : q) {
                if (!P.contains(m)) continue;
                bool ok = false;
                for (auto& q2 : decl_of(qs, m)) {
                    IntSet part;
                    for (int x : q2)
                        if (W.count(x)) part.insert(x);
                    if (within(part, q)) ok = true;
                }
                if (!ok) return false;
            }
    return true;
}

inline bool oracle_outlived(const QuorumSystem& qs, const Attack& a, ProcSet O) {
    if (O.empty()) return true;  // the empty set is outlived by convention
    return oracle_consistent(qs, a, O) && oracle_available(qs, O, O) && oracle_inclusion(qs, a, O);
}

// Reachability by Floyd-Warshall over the adjacency "p' in some quorum of p".
struct OracleGraph {
    std::vector<int> verts;
    std::map<int, std::map<int, bool>> reach;  // reflexive-transitive closure
    std::map<int, std::map<int, bool>> edge;
};

inline OracleGraph oracle_graph(const QuorumSystem& qs) {
    OracleGraph g;
    IntSet vs = as_ints(qs.active());
    for (auto& [p, Q] : qs.declarations())
        for (ProcSet q : Q)
            for (int m : as_ints(q)) vs.insert(m);
    g.verts.assign(vs.begin(), vs.end());
    for (int a : g.verts)
        for (int b : g.verts) g.edge[a][b] = g.reach[a][b] = (a == b);
    for (auto& [p, Q] : qs.declarations())
        for (ProcSet q : Q)
            for (int m : as_ints(q)) {
                g.edge[p][m] = true;
                g.reach[p][m] = true;
            }
    for (int k : g.verts)
        for (int i : g.verts)
            for (int j : g.verts)
                if (g.reach[i][k] && g.reach[k][j]) g.reach[i][j] = true;
    return g;
}

inline std::set<IntSet> oracle_components(const OracleGraph& g) {
    std::set<IntSet> out;
    for (int a : g.verts) {
        IntSet c;
        for (int b : g.verts)
            if (g.reach.at(a).at(b) && g.reach.at(b).at(a)) c.insert(b);
        out.insert(c);
    }
    return out;
}

inline std::set<IntSet> oracle_sinks(const OracleGraph& g) {
    std::set<IntSet> out;
    for (const IntSet& c : oracle_components(g)) {
        bool sink = true;
        for (int a : c)
            for (int b : g.verts)
                if (!c.count(b) && g.reach.at(a).at(b)) sink = false;
        if (sink) out.insert(c);
    }
    return out;
}

// Join growth rule run to its fixpoint over static declarations.
inline std::set<IntSet> oracle_join(const QuorumSystem& qs, ProcSet ps, const std::map<int, std::vector<IntSet>>& replies) {
    std::set<IntSet> S = {as_ints(ps)};
    std::set<int> probed;
    for (;;) {
        std::set<int> todo;
        for (auto& q : S)
            for (int m : q)
                if (!probed.count(m)) todo.insert(m);
        if (todo.empty()) return S;
        for (int m : todo) {
            probed.insert(m);
            std::vector<IntSet> Qm;
            if (auto it = replies.find(m); it != replies.end()) Qm = it->second;
            else Qm = decl_of(qs, m);
            std::set<IntSet> next;
            for (auto& q : S) {
                if (!q.count(m)) {
                    next.insert(q);
                    continue;
                }
                for (auto& q2 : Qm) {
                    IntSet u = q;
                    u.insert(q2.begin(), q2.end());
                    next.insert(u);
                }
            }
            // drop strict supersets
            std::set<IntSet> minimal;
            for (auto& a : next) {
                bool sup = false;
                for (auto& b : next)
                    if (a != b && within(b, a)) sup = true;
                if (!sup) minimal.insert(a);
            }
            S = minimal;
        }
    }
}

inline std::set<IntSet> as_int_sets(const QuorumSet& qs) {
    std::set<IntSet> out;
    for (ProcSet q : qs) out.insert(as_ints(q));
    return out;
}

// ---------------------------------------------------------------- generators

// Declarations drawn from one global family G whose members pairwise meet in
// the well-behaved set. Each process declares the minimal members of G that
// contain it (or one member of G when none does), which yields consistency at
// W and quorum sharing. Every Byzantine quorum keeps a well-behaved member.
inline Generated gen_family_system(Rng& rng, int max_n = 7, int max_byz = 2) {
    for (;;) {
        const int n = uniform(rng, 3, max_n);
        const ProcSet U = range_set(1, n);
        ProcSet B;
        const int nb = uniform(rng, 0, std::min(max_byz, n - 2));
        while (B.size() < nb) B.insert(uniform(rng, 1, n));
        const ProcSet W = U - B;

        QuorumSet G;
        const int k = uniform(rng, 1, 4);
        if (coin(rng)) {
            ProcSet core = ProcSet::single(random_member(rng, W));
            if (coin(rng, 0.3)) core.insert(random_member(rng, W));
            for (int i = 0; i < k; ++i) G.push_back(core | random_subset(rng, U, 0.4));
        } else {
            for (int tries = 0; tries < 60 && static_cast<int>(G.size()) < k; ++tries) {
                ProcSet g = random_subset(rng, U, 0.5);
                if (g.size() < 2) continue;
                bool ok = std::all_of(G.begin(), G.end(), [&](ProcSet h) { return (g & h & W).size() > 0; });
                if (ok) G.push_back(g);
            }
            if (G.empty()) continue;
        }
        bool byz_only = std::any_of(G.begin(), G.end(), [&](ProcSet g) { return !g.intersects(W); });
        if (byz_only) continue;

        Declarations d;
        for (ProcessId p : U) {
            QuorumSet mine;
            for (ProcSet g : G)
                if (g.contains(p)) mine.push_back(g);
            if (mine.empty()) mine.push_back(G[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(G.size()) - 1))]);
            d[p] = normalize(mine);
        }
        return {QuorumSystem::make(U, U, d), Attack::make(U, B), {}};
    }
}

// Family system, optionally perturbed with an extra quorum, whose largest
// maximal outlived set has at least two members.
inline Generated gen_outlived_system(Rng& rng, int max_n = 7, int max_byz = 2) {
    for (;;) {
        Generated g = gen_family_system(rng, max_n, max_byz);
        if (coin(rng)) {
            ProcessId p = random_member(rng, g.attack.well_behaved());
            ProcSet extra = random_subset(rng, g.qs.universe(), 0.5);
            extra.insert(p);
            Declarations d = g.qs.declarations();
            d[p].push_back(extra);
            g.qs = QuorumSystem::make(g.qs.universe(), g.qs.active(), d);
        }
        auto outs = maximal_outlived_sets(g.qs, g.attack);
        ProcSet best;
        for (ProcSet o : outs)
            if (o.size() > best.size()) best = o;
        if (best.size() < 2) continue;
        g.outlived = best;
        return g;
    }
}

// Fully random declarations; no guarantee of any property.
inline Generated gen_random_system(Rng& rng, int max_n = 6, int max_byz = 1) {
    const int n = uniform(rng, 1, max_n);
    const ProcSet U = range_set(1, n);
    ProcSet B;
    const int nb = uniform(rng, 0, std::min(max_byz, n - 1));
    while (B.size() < nb) B.insert(uniform(rng, 1, n));
    Declarations d;
    for (ProcessId p : U) {
        if (B.contains(p) && coin(rng, 0.3)) continue;
        QuorumSet Q;
        const int k = uniform(rng, 1, 3);
        for (int i = 0; i < k; ++i) {
            ProcSet q = random_subset(rng, U, 0.45);
            if (coin(rng, 0.7)) q.insert(p);
            if (q.empty()) q.insert(p);
            Q.push_back(q);
        }
        d[p] = normalize(Q);
    }
    return {QuorumSystem::make(U, U, d, U - B), Attack::make(U, B), {}};
}

}  // namespace hqs::testing
