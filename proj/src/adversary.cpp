#include "hqs/adversary.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "hqs/reconfig.hpp"

namespace hqs {

namespace {

Msg msg(MsgType t, ProcessId a = kNoProcess, ProcSet q = {}) {
    Msg m;
    m.type = t;
    m.a = a;
    m.q = q;
    return m;
}

ProcSet well_behaved(const AdversaryContext& ctx) { return ctx.world().node_ids(); }

class Silent : public Adversary {
public:
    std::string name() const override { return "silent"; }
};

class Cooperative : public Adversary {
public:
    explicit Cooperative(AdversaryParams p) : p_(std::move(p)) {}
    std::string name() const override { return "cooperative"; }
    void on_deliver(AdversaryContext& ctx, const Envelope& env) override {
        const Msg& m = env.msg;
        const ProcessId self = env.dst;
        switch (m.type) {
        case MsgType::Prob: {
            Msg r = msg(MsgType::Quorums);
            r.qs = p_.claim.empty() ? QuorumSet{ProcSet::single(self)} : p_.claim;
            ctx.send(self, env.src, r);
            break;
        }
        case MsgType::Inclusion: ctx.send(self, env.src, msg(MsgType::AckInclusion, kNoProcess, m.q)); break;
        case MsgType::AddCheck: ctx.send(self, env.src, msg(MsgType::CheckAck, m.a, m.q)); break;
        case MsgType::Exchange: {
            Msg r = msg(MsgType::Exchange);
            r.qs = m.qs;
            ctx.send(self, env.src, r);
            break;
        }
        default: break;
        }
    }

private:
    AdversaryParams p_;
};

class RandomLies : public Adversary {
public:
    explicit RandomLies(AdversaryParams p) : p_(std::move(p)) {}
    std::string name() const override { return "random_lies"; }

    void on_start(AdversaryContext& ctx) override {
        for (ProcessId b : ctx.byzantine()) burst(ctx, b);
    }
    void on_deliver(AdversaryContext& ctx, const Envelope& env) override { burst(ctx, env.dst); }

private:
    ProcSet random_set(AdversaryContext& ctx, ProcSet pool) {
        ProcSet s;
        std::bernoulli_distribution coin(0.5);
        for (ProcessId p : pool)
            if (coin(ctx.rng())) s.insert(p);
        return s;
    }

    void burst(AdversaryContext& ctx, ProcessId self) {
        int& used = used_[self];
        const ProcSet wb = well_behaved(ctx);
        if (wb.empty()) return;
        const ProcSet everyone = wb | ctx.byzantine();
        std::uniform_int_distribution<int> count(0, 2);
        for (int n = count(ctx.rng()); n > 0 && used < p_.budget; --n, ++used) {
            static constexpr MsgType kinds[] = {
                MsgType::Exchange, MsgType::Extend,    MsgType::Check,     MsgType::Left,   MsgType::Quorums,
                MsgType::Prob,     MsgType::Inclusion, MsgType::CheckAdd,  MsgType::AddCheck, MsgType::CheckAck,
                MsgType::CheckNack, MsgType::Commit,   MsgType::Abort,     MsgType::Success, MsgType::Fail,
                MsgType::BrbSend,  MsgType::BrbEcho,   MsgType::BrbReady,  MsgType::Junk,
            };
            std::uniform_int_distribution<std::size_t> kind(0, std::size(kinds) - 1);
            std::uniform_int_distribution<int> val(0, 2);
            std::vector<ProcessId> all = everyone.members();
            std::uniform_int_distribution<std::size_t> who(0, all.size() - 1);
            Msg m = msg(kinds[kind(ctx.rng())], all[who(ctx.rng())], random_set(ctx, everyone));
            m.b = all[who(ctx.rng())];
            m.value = val(ctx.rng());
            m.flag = val(ctx.rng()) == 0;
            ProcSet extra = random_set(ctx, everyone);
            if (!extra.empty()) m.qs.push_back(extra);
            if (!m.q.empty()) m.qs.push_back(m.q);
            if (m.type == MsgType::Commit || m.type == MsgType::Fail)
                m.sigs.push_back(ctx.sign(self, "noise|" + std::to_string(m.value)));
            if (m.type == MsgType::Check) {
                m.a = self;
                ctx.tob_broadcast(self, m);
                continue;
            }
            std::vector<ProcessId> dsts = wb.members();
            std::uniform_int_distribution<std::size_t> dst(0, dsts.size() - 1);
            ctx.send(self, dsts[dst(ctx.rng())], m);
        }
    }

    AdversaryParams p_;
    std::map<ProcessId, int> used_;
};

class FiveDeceivesFour : public Adversary {
public:
    explicit FiveDeceivesFour(AdversaryParams p) : p_(std::move(p)) {}
    std::string name() const override { return "five_deceives_four"; }

    void on_start(AdversaryContext& ctx) override {
        for (ProcessId b : ctx.byzantine()) push(ctx, b);
    }
    void on_deliver(AdversaryContext& ctx, const Envelope& env) override {
        const ProcessId self = env.dst;
        if (env.msg.type == MsgType::Exchange) {
            // Agree with whatever the sender claims so honest agreement is never blocked.
            Msg r = msg(MsgType::Exchange);
            r.qs = env.msg.qs;
            ctx.send(self, env.src, r);
        }
        push(ctx, self);
    }

private:
    void push(AdversaryContext& ctx, ProcessId self) {
        if (pushed_.contains(self)) return;
        pushed_.insert(self);
        for (ProcSet q : p_.claim) {
            Msg e = msg(MsgType::Extend, kNoProcess, q);
            for (ProcessId t : p_.targets) ctx.send(self, t, e);
        }
    }

    AdversaryParams p_;
    ProcSet pushed_;
};

class SplitRequester : public Adversary {
public:
    explicit SplitRequester(AdversaryParams p) : p_(std::move(p)) {}
    std::string name() const override { return "split_requester"; }

    void on_start(AdversaryContext& ctx) override {
        for (ProcessId m : p_.qc) ctx.send(p_.requester, m, msg(MsgType::CheckAdd, p_.requester, p_.qc));
    }

    void on_deliver(AdversaryContext& ctx, const Envelope& env) override {
        if (env.dst != p_.requester || done_) return;
        const Msg& m = env.msg;
        if (m.q != p_.qc || !p_.qc.contains(env.src)) return;
        if (m.type == MsgType::Commit && !m.sigs.empty()) {
            commits_[env.src] = m.sigs[0];
            if (static_cast<int>(commits_.size()) == p_.qc.size()) split(ctx);
        } else if (m.type == MsgType::Abort) {
            split(ctx);
        }
    }

private:
    void split(AdversaryContext& ctx) {
        done_ = true;
        Msg ok = msg(MsgType::Success, p_.requester, p_.qc);
        for (auto& [p, s] : commits_) ok.sigs.push_back(s);
        Msg fail = msg(MsgType::Fail, p_.requester, p_.qc);
        fail.sigs = {ctx.sign(p_.requester, fail_payload(p_.requester, p_.qc))};
        const bool can_succeed = static_cast<int>(commits_.size()) == p_.qc.size();
        std::bernoulli_distribution coin(0.5);
        for (ProcessId m : p_.qc) ctx.send(p_.requester, m, can_succeed && coin(ctx.rng()) ? ok : fail);
    }

    AdversaryParams p_;
    std::map<ProcessId, Signature> commits_;
    bool done_ = false;
};

class BrbEquivocate : public Adversary {
public:
    explicit BrbEquivocate(AdversaryParams p) : p_(std::move(p)) {}
    std::string name() const override { return "brb_equivocate"; }

    void on_start(AdversaryContext& ctx) override {
        std::bernoulli_distribution coin(0.5);
        for (ProcessId b : ctx.byzantine()) {
            for (ProcessId p : well_behaved(ctx)) {
                Msg s = msg(MsgType::BrbSend, b);
                s.value = coin(ctx.rng()) ? 1 : 2;
                ctx.send(b, p, s);
            }
        }
    }

    void on_deliver(AdversaryContext& ctx, const Envelope& env) override {
        const Msg& m = env.msg;
        if (m.type != MsgType::BrbSend && m.type != MsgType::BrbEcho && m.type != MsgType::BrbReady) return;
        int& used = used_[env.dst];
        if (used >= p_.budget) return;
        ++used;
        std::bernoulli_distribution coin(0.5);
        for (ProcessId p : well_behaved(ctx)) {
            Msg e = msg(coin(ctx.rng()) ? MsgType::BrbEcho : MsgType::BrbReady, m.a);
            e.value = coin(ctx.rng()) ? m.value : m.value + 1;
            ctx.send(env.dst, p, e);
        }
    }

private:
    AdversaryParams p_;
    std::map<ProcessId, int> used_;
};

class Flooder : public Adversary {
public:
    std::string name() const override { return "flooder"; }
    void on_start(AdversaryContext& ctx) override {
        for (ProcessId b : ctx.byzantine()) ctx.send(b, b, msg(MsgType::Junk));
    }
    void on_deliver(AdversaryContext& ctx, const Envelope& env) override {
        if (env.msg.type == MsgType::Junk) ctx.send(env.dst, env.dst, msg(MsgType::Junk));
    }
};

}  // namespace

std::vector<std::string> adversary_names() {
    return {"silent", "cooperative", "random_lies", "five_deceives_four", "split_requester", "brb_equivocate",
            "flooder"};
}

std::unique_ptr<Adversary> make_adversary(const std::string& name, const AdversaryParams& params) {
    if (name == "silent" || name == "none") return std::make_unique<Silent>();
    if (name == "cooperative") return std::make_unique<Cooperative>(params);
    if (name == "random_lies") return std::make_unique<RandomLies>(params);
    if (name == "five_deceives_four") return std::make_unique<FiveDeceivesFour>(params);
    if (name == "split_requester") {
        if (params.requester == kNoProcess || params.qc.empty())
            throw Error(ErrorCode::InputError, "split_requester needs requester and qc");
        return std::make_unique<SplitRequester>(params);
    }
    if (name == "brb_equivocate") return std::make_unique<BrbEquivocate>(params);
    if (name == "flooder") return std::make_unique<Flooder>();
    throw Error(ErrorCode::InputError, "unknown adversary script '" + name + "'");
}

}  // namespace hqs
