#include <doctest.h>

#include "hqs/adversary.hpp"
#include "hqs/discovery.hpp"
#include "hqs/graph.hpp"
#include "support.hpp"

using namespace hqs;
using namespace hqs::testing;

namespace {

struct Net {
    std::unique_ptr<World> w;
    RunResult r;
};

// Discovery at every well-behaved host, optional adversary, run to quiescence.
Net discover(const SystemFile& f, std::unique_ptr<Adversary> adv, std::uint64_t seed = 0, ProcSet who = {},
             ValidQ v = {}) {
    SchedulePolicy pol;
    pol.seed = seed;
    pol.mode = ScheduleMode::AdversarialReorder;
    Net n{std::make_unique<World>(f.attack, pol), {}};
    if (!v) v = validq_oracle(minimal_quorums(f.system, f.attack));
    const ProcSet hosts = f.system.active() & f.attack.well_behaved();
    for (ProcessId p : hosts) n.w->add_node(p, std::make_unique<DiscoveryNode>(f.system.quorums(p), v));
    if (adv) n.w->set_adversary(std::move(adv));
    for (ProcessId p : (who.empty() ? hosts : who)) n.w->inject_request(p, Msg{MsgType::ReqDiscover});
    n.r = n.w->run();
    return n;
}

const DiscoveryState& st(const Net& n, ProcessId p) { return n.w->node_as<DiscoveryNode>(p).state(); }

// Sends one Extend(q) as `from` to `to` at start.
struct OneExtend : Adversary {
    ProcessId from, to;
    ProcSet q;
    OneExtend(ProcessId f, ProcessId t, ProcSet s) : from(f), to(t), q(s) {}
    std::string name() const override { return "one_extend"; }
    void on_start(AdversaryContext& ctx) override {
        Msg m;
        m.type = MsgType::Extend;
        m.q = q;
        ctx.send(from, to, m);
    }
};

// Lies in Exchange: reports {{5}} to everyone who asks.
struct LiarExchange : Adversary {
    std::string name() const override { return "liar"; }
    void on_deliver(AdversaryContext& ctx, const Envelope& env) override {
        if (env.msg.type != MsgType::Exchange) return;
        Msg m;
        m.type = MsgType::Exchange;
        m.qs = {ProcSet{5}};
        ctx.send(env.dst, env.src, m);
    }
};

}  // namespace

TEST_CASE("fig2: 1 and 2 agree on {1,2} in phase one") {
    auto f = fixture("fig2");
    auto n = discover(f, make_adversary("silent"), 0, ProcSet{1, 2});
    CHECK(st(n, 1).in_sink);
    CHECK(st(n, 2).in_sink);
    CHECK(contains_quorum(st(n, 1).extended, ProcSet{1, 2}));
    CHECK(st(n, 1).F == ProcSet{1, 2});
    // Exchange went to every member of 1's quorums, byzantine 5 included
    int exchanges_from_1 = 0;
    for (auto& line : n.r.trace) {
        auto e = nlohmann::json::parse(line);
        if (e["kind"] == "send" && e["src"] == 1 && e["msg"]["type"] == "Exchange") ++exchanges_from_1;
    }
    CHECK(exchanges_from_1 == 4);
}

TEST_CASE("fig2: 3 accepts Extend({1,2}) from 1 alone") {
    auto f = fixture("fig2");
    auto n = discover(f, make_adversary("silent"), 0, ProcSet{1, 2, 3});
    CHECK(st(n, 3).in_sink);
    CHECK(st(n, 3).extended.empty());  // not through phase one: 5 never answered
}

TEST_CASE("fig2: lying 5 keeps 3 out of phase one") {
    auto f = fixture("fig2");
    auto n = discover(f, std::make_unique<LiarExchange>(), 0, ProcSet{3});
    CHECK_FALSE(st(n, 3).in_sink);
    CHECK(st(n, 3).qmap.at(5) == QuorumSet{ProcSet{5}});
}

TEST_CASE("fig2: Extend from 5 alone does not fool 4") {
    auto f = fixture("fig2");
    auto n = discover(f, std::make_unique<OneExtend>(5, 4, ProcSet{1, 3, 5}), 0, ProcSet{4});
    CHECK_FALSE(st(n, 4).in_sink);
    CHECK(st(n, 4).ext_senders.at(ProcSet{1, 3, 5}.bits()) == ProcSet{5});
}

TEST_CASE("validq rejects empty and invalid quorums") {
    auto mq = QuorumSet{ProcSet{1, 2}};
    CHECK_FALSE(validq_oracle(mq)(ProcSet{}));
    CHECK(validq_oracle(mq)(ProcSet{1, 2}));
    CHECK_FALSE(validq_oracle(mq)(ProcSet{1, 2, 3}));
    CHECK_FALSE(validq_threshold(2)(ProcSet{}));
    CHECK(validq_threshold(2)(ProcSet{3, 4}));
    CHECK_FALSE(validq_threshold(3)(ProcSet{3, 4}));

    auto f = fixture("fig2");
    auto n = discover(f, std::make_unique<OneExtend>(5, 3, ProcSet{}), 0, ProcSet{6});
    CHECK_FALSE(st(n, 3).in_sink);
}

TEST_CASE("singleton node discovers itself") {
    auto f = fixture("singleton");
    auto n = discover(f, nullptr);
    CHECK(st(n, 1).in_sink);
    CHECK(st(n, 1).F == ProcSet{1});
}

TEST_CASE("duplicate exchange and extend are idempotent") {
    auto f = fixture("fig2");
    struct Twice : Adversary {
        std::string name() const override { return "twice"; }
        void on_deliver(AdversaryContext& ctx, const Envelope& env) override {
            if (env.msg.type != MsgType::Exchange) return;
            Msg m;
            m.type = MsgType::Exchange;
            m.qs = {ProcSet{1, 3, 5}};
            ctx.send(5, env.src, m);
            ctx.send(5, env.src, m);
        }
    };
    auto n = discover(f, std::make_unique<Twice>());
    for (ProcessId p : ProcSet{1, 3}) {
        CHECK(st(n, p).extended.size() <= st(n, p).Q.size());
        CHECK(st(n, p).qmap.at(5) == QuorumSet{ProcSet{1, 3, 5}});
    }
}

// ---------------------------------------------------------------- properties

TEST_CASE("property: five deceives four, 100 seeds") {
    auto f = fixture("fig2");
    AdversaryParams params;
    params.targets = ProcSet{4, 6};
    params.claim = {ProcSet{1, 3, 5}, ProcSet{1, 2}};
    const ProcSet sink = sink_members(f.system);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto n = discover(f, make_adversary("five_deceives_four", params), seed);
        ProcSet proto;
        for (ProcessId p : n.w->node_ids())
            if (st(n, p).in_sink) proto.insert(p);
        CHECK(ProcSet{1, 2, 3}.subset_of(proto));
        CHECK(proto.subset_of(sink));
        CHECK_FALSE(proto.contains(4));
    }
}

TEST_CASE("property: completeness, accuracy and followers on generated systems") {
    Rng rng(51);
    int with_available = 0;
    for (int i = 0; i < 150; ++i) {
        auto g = gen_family_system(rng);
        SystemFile f{g.qs, g.attack, {}};
        const ProcSet W = g.attack.well_behaved();
        const char* script = i % 3 == 0 ? "random_lies" : i % 3 == 1 ? "cooperative" : "silent";
        auto n = discover(f, make_adversary(script), rng());
        CHECK(n.r.outcome == Outcome::Quiescent);
        const ProcSet sink = sink_members(g.qs);
        auto mq = minimal_quorums(g.qs, g.attack);
        // completeness leans on some quorum being entirely well-behaved
        bool available = std::any_of(mq.begin(), mq.end(), [&](ProcSet q) { return q.subset_of(W); });
        with_available += available;
        for (ProcSet q : mq) {
            if (available)
                for (ProcessId p : q & W) CHECK(st(n, p).in_sink);
            if (!q.intersects(g.attack.byzantine))
                for (ProcessId p : q) CHECK(contains_quorum(st(n, p).extended, q));
        }
        for (ProcessId p : W) {
            if (st(n, p).in_sink) CHECK(sink.contains(p));
            CHECK((followers(g.qs, p) & W).subset_of(st(n, p).F));
        }
    }
    CHECK(with_available > 50);
}
