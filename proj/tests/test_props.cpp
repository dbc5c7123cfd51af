#include <doctest.h>

#include "support.hpp"

using namespace hqs;
using namespace hqs::testing;

namespace {

const ProcSet W1{1, 2, 3, 5};  // fig1 well-behaved

// Re-checks a failing report's witness straight from the definitions.
bool witness_confirms(const PropertyReport& r, const QuorumSystem& qs, const Attack& a, ProcSet P) {
    if (auto* w = std::get_if<PairWitness>(&r.witness)) {
        return contains_quorum(qs.quorums(w->p1), w->q1) && contains_quorum(qs.quorums(w->p2), w->q2) &&
               !(w->q1 & w->q2 & P).intersects(a.well_behaved());
    }
    if (auto* w = std::get_if<ProcessWitness>(&r.witness)) {
        for (ProcSet q : qs.quorums(w->p))
            if (q.subset_of(P)) return false;
        return true;
    }
    if (auto* w = std::get_if<MemberWitness>(&r.witness)) {
        for (ProcSet q2 : qs.quorums(w->member))
            if ((q2 & a.well_behaved()).subset_of(w->q)) return false;
        return contains_quorum(qs.quorums(w->p), w->q) && w->q.contains(w->member);
    }
    return false;
}

}  // namespace

TEST_CASE("consistency examples") {
    auto f = fixture("fig1");
    CHECK(check_consistency(f.system, f.attack, W1).holds);

    auto s5 = fixture("attack_s5");
    auto r = check_consistency(s5.system, s5.attack, s5.attack.well_behaved());
    REQUIRE_FALSE(r.holds);
    auto* w = std::get_if<PairWitness>(&r.witness);
    REQUIRE(w);
    std::set<std::uint64_t> pair = {w->q1.bits(), w->q2.bits()};
    CHECK(pair == std::set<std::uint64_t>{ProcSet{2, 4}.bits(), ProcSet{1, 3}.bits()});

    auto one = fixture("singleton");
    CHECK(check_consistency(one.system, one.attack, ProcSet{1}).holds);

    CHECK_THROWS_AS(check_consistency(f.system, f.attack, ProcSet{4}), Error);
}

TEST_CASE("availability examples") {
    auto f = fixture("fig1");
    CHECK(check_availability(f.system, ProcSet{2, 3, 5}, ProcSet{2, 3, 5}).holds);
    auto r = check_availability(f.system, ProcSet{1}, W1);
    CHECK_FALSE(r.holds);
    CHECK(std::get<ProcessWitness>(r.witness).p == 1);
    CHECK(check_availability(f.system, {}, {}).holds);
    CHECK_THROWS_AS(check_availability(f.system, ProcSet{9}, W1), Error);

    CHECK(check_available_inside(f.system, ProcSet{2, 3, 5}).holds);
    CHECK_FALSE(check_available_inside(f.system, ProcSet{1, 2}).holds);
    CHECK(check_available_inside(f.system, {}).holds);
}

TEST_CASE("active availability examples") {
    auto f = fixture("fig1");
    CHECK(check_active_availability(f.system, ProcSet{2, 3, 5}, ProcSet{5}).holds);
    CHECK(check_active_availability(f.system, ProcSet{2, 5}, ProcSet{3}).holds);
    for (ProcSet P : {ProcSet{2, 3, 5}, ProcSet{1, 2}, ProcSet{}})
        CHECK(check_active_availability(f.system, P, {}).holds == check_available_inside(f.system, P).holds);
}

TEST_CASE("inclusion examples") {
    auto f = fixture("fig1");
    CHECK(check_quorum_inclusion(f.system, f.attack, W1).holds);
    CHECK(check_quorum_inclusion(f.system, f.attack, {}).holds);

    auto added = apply_reconfig(f.system, ReconfigOp::add(3, ProcSet{3, 5}));
    auto r = check_quorum_inclusion(added, f.attack, ProcSet{2, 3, 5});
    REQUIRE_FALSE(r.holds);
    auto w = std::get<MemberWitness>(r.witness);
    CHECK(w.member == 5);
    CHECK(w.q == ProcSet{3, 5});
}

TEST_CASE("sharing examples") {
    auto dqs = QuorumSystem::make(ProcSet{1, 2, 3}, {{1, {ProcSet{1, 2, 3}}}, {2, {ProcSet{1, 2, 3}}}, {3, {ProcSet{1, 2, 3}}}});
    CHECK(check_quorum_sharing(dqs).holds);
    auto f = fixture("fig1");
    auto r = check_quorum_sharing(f.system);
    REQUIRE_FALSE(r.holds);
    CHECK(std::get<MemberWitness>(r.witness).member == 4);
    CHECK(check_quorum_sharing(fixture("singleton").system).holds);
}

TEST_CASE("tentative inclusion examples") {
    auto f = fixture("fig1");
    auto added = apply_reconfig(f.system, ReconfigOp::add(3, ProcSet{3, 5}));
    CHECK(check_tentative_inclusion(f.system, f.attack, W1, {}).holds ==
          check_quorum_inclusion(f.system, f.attack, W1).holds);
    TentativeMap t;
    t[5].push_back({3, ProcSet{3, 5}});
    CHECK(check_tentative_inclusion(added, f.attack, ProcSet{2, 3, 5}, t).holds);
    TentativeMap useless;
    useless[5].push_back({3, ProcSet{1, 2, 5}});
    CHECK_FALSE(check_tentative_inclusion(added, f.attack, ProcSet{2, 3, 5}, useless).holds);
}

TEST_CASE("active inclusion examples") {
    auto f = fixture("fig1");
    CHECK(check_active_inclusion(f.system, f.attack, W1, {}).holds);
    // 5 is mid-leave: it already dropped itself from {2,5}, 2 still lists {2,5}
    Declarations d = f.system.declarations();
    d[5] = {ProcSet{2}};
    auto mid = QuorumSystem::unchecked(f.system.universe(), f.system.active(), d);
    CHECK_FALSE(check_active_inclusion(mid, f.attack, ProcSet{1, 2, 3}, {}).holds);
    CHECK(check_active_inclusion(mid, f.attack, ProcSet{1, 2, 3}, ProcSet{5}).holds);
    CHECK(check_active_inclusion(f.system, f.attack, {}, W1).holds);
}

TEST_CASE("outlived examples") {
    auto f = fixture("fig1");
    CHECK(check_outlived(f.system, f.attack, ProcSet{2, 3, 5}).holds);
    CHECK_FALSE(check_outlived(f.system, f.attack, W1).holds);
    CHECK(check_outlived(f.system, f.attack, {}).holds);

    CHECK(maximal_outlived_sets(f.system, f.attack) == std::vector<ProcSet>{ProcSet{2, 3, 5}});
    // disjoint cliques break consistency at every nonempty set
    CHECK(maximal_outlived_sets(fixture("two_cliques").system, fixture("two_cliques").attack).empty());
    auto dqs = fixture("dqs");
    CHECK(maximal_outlived_sets(dqs.system, dqs.attack) == std::vector<ProcSet>{dqs.attack.well_behaved()});

    auto disjoint = QuorumSystem::make(ProcSet{1, 2}, {{1, {ProcSet{2}}}, {2, {ProcSet{1}}}});
    CHECK(maximal_outlived_sets(disjoint, Attack::make(ProcSet{1, 2}, {})).empty());

    Declarations big;
    for (int p = 0; p < 13; ++p) big[p] = {range_set(0, 12)};
    CHECK_THROWS_AS(maximal_outlived_sets(QuorumSystem::make(range_set(0, 12), big), Attack::make(range_set(0, 12), {})),
                    Error);
}

TEST_CASE("multi-attack lifting folds reports") {
    auto f = fixture("fig1");
    std::vector<Attack> attacks = {f.attack, Attack::make(f.attack.universe, ProcSet{4, 5})};
    auto r = for_all_attacks(attacks, [&](const Attack& a) { return check_consistency(f.system, a, ProcSet{1, 2}); });
    CHECK(r.holds);
    auto bad = for_all_attacks(attacks, [&](const Attack& a) { return check_consistency(f.system, a, ProcSet{3}); });
    CHECK_FALSE(bad.holds);
}

// ---------------------------------------------------------------- properties

TEST_CASE("property: checkers agree with the definition oracles") {
    Rng rng(21);
    for (int i = 0; i < 400; ++i) {
        auto g = gen_random_system(rng, 6, 2);
        const ProcSet W = g.attack.well_behaved();
        ProcSet P = random_subset(rng, W);
        auto c = check_consistency(g.qs, g.attack, P);
        CHECK(c.holds == oracle_consistent(g.qs, g.attack, P));
        if (!c.holds) CHECK(witness_confirms(c, g.qs, g.attack, P));

        ProcSet avail = P & g.qs.active();
        auto av = check_available_inside(g.qs, avail);
        CHECK(av.holds == oracle_available(g.qs, avail, avail));
        if (!av.holds) CHECK(witness_confirms(av, g.qs, g.attack, avail));

        auto inc = check_quorum_inclusion(g.qs, g.attack, P);
        CHECK(inc.holds == oracle_inclusion(g.qs, g.attack, P));
        if (!inc.holds) CHECK(witness_confirms(inc, g.qs, g.attack, P));

        CHECK(check_quorum_sharing(g.qs).holds == oracle_sharing(g.qs));
        CHECK(check_outlived(g.qs, g.attack, avail).holds == oracle_outlived(g.qs, g.attack, avail));
        CHECK(check_active_inclusion(g.qs, g.attack, P, {}).holds == inc.holds);
    }
}

TEST_CASE("property: maximal outlived sets are exactly the maximal oracle-outlived subsets") {
    Rng rng(22);
    for (int i = 0; i < 120; ++i) {
        auto g = coin(rng) ? gen_random_system(rng, 6, 1) : gen_family_system(rng, 6, 1);
        const auto Wm = g.attack.well_behaved().members();
        std::vector<ProcSet> good;
        for (std::uint64_t mask = 1; mask < (1ull << Wm.size()); ++mask) {
            ProcSet O;
            for (std::size_t k = 0; k < Wm.size(); ++k)
                if (mask >> k & 1) O.insert(Wm[k]);
            if (oracle_outlived(g.qs, g.attack, O)) good.push_back(O);
        }
        std::set<std::uint64_t> expect;
        for (ProcSet O : good)
            if (std::none_of(good.begin(), good.end(), [O](ProcSet b) { return O.strict_subset_of(b); }))
                expect.insert(O.bits());
        std::set<std::uint64_t> got;
        for (ProcSet O : maximal_outlived_sets(g.qs, g.attack)) got.insert(O.bits());
        CHECK(got == expect);
    }
}

TEST_CASE("property: minimal-quorum intersection decides consistency") {
    Rng rng(23);
    for (int i = 0; i < 400; ++i) {
        auto g = gen_random_system(rng, 7, 2);
        const ProcSet W = g.attack.well_behaved();
        auto mq = minimal_quorums(g.qs, g.attack);
        bool mq_meet = true;
        for (ProcSet a : mq)
            for (ProcSet b : mq) mq_meet &= (a & b & W).size() > 0;
        bool all_meet = oracle_consistent(g.qs, g.attack, W);
        CHECK(mq_meet == all_meet);
        if (mq_meet) CHECK(check_consistency(g.qs, g.attack, W).holds);
    }
}

TEST_CASE("property: blocking sets meet available sets") {
    Rng rng(24);
    for (int i = 0; i < 150; ++i) {
        auto g = gen_random_system(rng, 6, 1);
        const ProcSet W = g.attack.well_behaved();
        ProcSet P = random_subset(rng, W & g.qs.active(), 0.6);
        ProcSet L = random_subset(rng, g.qs.universe(), 0.2);
        bool inside = check_available_inside(g.qs, P).holds;
        bool active_inside = check_active_availability(g.qs, P, L).holds;
        const auto U = g.qs.universe().members();
        for (std::uint64_t mask = 0; mask < (1ull << U.size()); ++mask) {
            ProcSet B;
            for (std::size_t k = 0; k < U.size(); ++k)
                if (mask >> k & 1) B.insert(U[k]);
            for (ProcessId p : P) {
                if (inside && is_blocking(g.qs, p, B)) CHECK(B.intersects(P));
                if (active_inside && !L.contains(p) && is_active_blocking(g.qs, p, B, L)) CHECK(B.intersects(P - L));
            }
        }
    }
}

TEST_CASE("property: monotonicity") {
    Rng rng(25);
    for (int i = 0; i < 400; ++i) {
        auto g = gen_random_system(rng, 6, 1);
        const ProcSet W = g.attack.well_behaved();
        ProcSet small = random_subset(rng, W);
        ProcSet large = small | random_subset(rng, W);
        if (check_consistency(g.qs, g.attack, small).holds) CHECK(check_consistency(g.qs, g.attack, large).holds);

        ProcSet P = random_subset(rng, W);
        ProcSet L1 = random_subset(rng, g.qs.universe(), 0.3);
        ProcSet L2 = L1 | random_subset(rng, g.qs.universe(), 0.3);
        if (check_active_inclusion(g.qs, g.attack, P, L1).holds) CHECK(check_active_inclusion(g.qs, g.attack, P, L2).holds);
        ProcSet A = P & g.qs.active();
        if (check_active_availability(g.qs, A, L1).holds) CHECK(check_active_availability(g.qs, A, L2).holds);
    }
}
