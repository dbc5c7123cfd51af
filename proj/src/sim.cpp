#include "hqs/sim.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace hqs {

const char* msg_type_name(MsgType t) {
    switch (t) {
    case MsgType::ReqDiscover: return "Discover";
    case MsgType::ReqLeave: return "Leave";
    case MsgType::ReqRemove: return "Remove";
    case MsgType::ReqAdd: return "Add";
    case MsgType::ReqJoin: return "Join";
    case MsgType::ReqBroadcast: return "Broadcast";
    case MsgType::Exchange: return "Exchange";
    case MsgType::Extend: return "Extend";
    case MsgType::Check: return "Check";
    case MsgType::Left: return "Left";
    case MsgType::Prob: return "Prob";
    case MsgType::Quorums: return "Quorums";
    case MsgType::Inclusion: return "Inclusion";
    case MsgType::AckInclusion: return "AckInclusion";
    case MsgType::NackInclusion: return "NackInclusion";
    case MsgType::CheckAdd: return "CheckAdd";
    case MsgType::AddCheck: return "AddCheck";
    case MsgType::CheckAck: return "CheckAck";
    case MsgType::CheckNack: return "CheckNack";
    case MsgType::Commit: return "Commit";
    case MsgType::Abort: return "Abort";
    case MsgType::Success: return "Success";
    case MsgType::Fail: return "Fail";
    case MsgType::BrbSend: return "Send";
    case MsgType::BrbEcho: return "Echo";
    case MsgType::BrbReady: return "Ready";
    case MsgType::Timer: return "Timer";
    case MsgType::Junk: return "Junk";
    }
    return "Unknown";
}

const char* channel_name(Channel c) {
    switch (c) {
    case Channel::Apl: return "apl";
    case Channel::Tob: return "tob";
    case Channel::Request: return "request";
    case Channel::Timer: return "timer";
    }
    return "unknown";
}

const char* schedule_mode_name(ScheduleMode m) {
    switch (m) {
    case ScheduleMode::RandomFair: return "random_fair";
    case ScheduleMode::AdversarialReorder: return "adversarial_reorder";
    case ScheduleMode::ScriptedInterleaving: return "scripted";
    }
    return "unknown";
}

const char* outcome_name(Outcome o) {
    return o == Outcome::Quiescent ? "quiescent" : "step_cap_exceeded";
}

static std::string set_json(ProcSet s) {
    std::string out = "[";
    bool first = true;
    for (ProcessId p : s) {
        if (!first) out += ',';
        out += std::to_string(p);
        first = false;
    }
    return out + "]";
}

static std::string body_json(const Msg& m, bool with_sigs) {
    std::string s = "{\"type\":\"";
    s += msg_type_name(m.type);
    s += '"';
    if (m.a != kNoProcess) s += ",\"a\":" + std::to_string(m.a);
    if (m.b != kNoProcess) s += ",\"b\":" + std::to_string(m.b);
    if (!m.q.empty()) s += ",\"q\":" + set_json(m.q);
    if (!m.qs.empty()) {
        s += ",\"qs\":[";
        for (std::size_t i = 0; i < m.qs.size(); ++i) {
            if (i) s += ',';
            s += set_json(m.qs[i]);
        }
        s += ']';
    }
    if (m.value != 0) s += ",\"value\":" + std::to_string(m.value);
    if (m.flag) s += ",\"flag\":true";
    if (with_sigs && !m.sigs.empty()) {
        s += ",\"sigs\":[";
        for (std::size_t i = 0; i < m.sigs.size(); ++i) {
            if (i) s += ',';
            s += "[" + std::to_string(m.sigs[i].signer) + "," + std::to_string(m.sigs[i].digest) + "]";
        }
        s += ']';
    }
    return s + "}";
}

std::string Msg::json() const { return body_json(*this, true); }
std::string Msg::payload() const { return body_json(*this, false); }

std::uint64_t fingerprint(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string RunResult::trace_text() const {
    std::string out;
    for (const std::string& line : trace) {
        out += line;
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------

std::uint64_t Context::step() const { return world_.step_; }

void Context::send(ProcessId dst, Msg m) { world_.enqueue(self_, dst, Channel::Apl, std::move(m)); }

void Context::tob_broadcast(Msg m) { world_.tob(self_, std::move(m)); }

void Context::respond(const std::string& kind, std::int64_t value) { world_.respond(self_, kind, value); }

Signature Context::sign(const std::string& payload) { return world_.sign_as(self_, payload); }

bool Context::verify(const Signature& sig, ProcessId signer, const std::string& payload) const {
    return world_.verify_sig(sig, signer, payload);
}

void Context::set_timer(std::uint64_t after_steps, Msg m) {
    world_.enqueue(self_, self_, Channel::Timer, std::move(m), world_.step_ + after_steps);
}

ProcSet AdversaryContext::byzantine() const { return world_.attack_.byzantine; }

std::mt19937_64& AdversaryContext::rng() { return world_.adv_rng_; }

std::uint64_t AdversaryContext::step() const { return world_.step_; }

void AdversaryContext::send(ProcessId as, ProcessId dst, Msg m) {
    if (!world_.attack_.is_byzantine(as))
        throw Error(ErrorCode::ForgedSender, "adversary cannot send as well-behaved " + std::to_string(as));
    world_.enqueue(as, dst, Channel::Apl, std::move(m));
}

void AdversaryContext::tob_broadcast(ProcessId as, Msg m) {
    if (!world_.attack_.is_byzantine(as))
        throw Error(ErrorCode::ForgedSender, "adversary cannot broadcast as well-behaved " + std::to_string(as));
    world_.tob(as, std::move(m));
}

Signature AdversaryContext::sign(ProcessId signer, const std::string& payload) {
    if (!world_.attack_.is_byzantine(signer))
        throw Error(ErrorCode::ForgedSigner, "adversary cannot sign for well-behaved " + std::to_string(signer));
    return world_.sign_as(signer, payload);
}

bool AdversaryContext::verify(const Signature& sig, ProcessId signer, const std::string& payload) const {
    return world_.verify_sig(sig, signer, payload);
}

// ---------------------------------------------------------------------------

World::World(Attack attack, SchedulePolicy policy, std::uint64_t step_cap)
    : attack_(attack),
      policy_(std::move(policy)),
      step_cap_(step_cap),
      sched_rng_(policy_.seed),
      adv_rng_(policy_.seed ^ 0x9e3779b97f4a7c15ull) {
    if (step_cap_ == 0) throw Error(ErrorCode::PreconditionViolated, "step cap must be positive");
}

World::~World() = default;

void World::add_node(ProcessId p, std::unique_ptr<Node> node) {
    if (attack_.is_byzantine(p))
        throw Error(ErrorCode::PreconditionViolated,
                    "byzantine process " + std::to_string(p) + " is driven by the adversary");
    node_ids_.insert(p);
    nodes_[p] = std::move(node);
}

void World::set_adversary(std::unique_ptr<Adversary> adversary) { adversary_ = std::move(adversary); }

void World::set_tob_liveness(TobLiveness mode, ProcSet outlived) {
    tob_mode_ = mode;
    tob_outlived_ = outlived;
}

void World::inject_request(ProcessId node, Msg request, std::uint64_t at) {
    enqueue(node, node, Channel::Request, std::move(request), at);
}

void World::add_probe(std::string name, Probe probe) { probes_.emplace_back(std::move(name), std::move(probe)); }

void World::add_final_probe(std::string name, Probe probe) {
    final_probes_.emplace_back(std::move(name), std::move(probe));
}

Node* World::node(ProcessId p) const {
    auto it = nodes_.find(p);
    return it == nodes_.end() ? nullptr : it->second.get();
}

ProcSet World::responded(const std::vector<std::string>& kinds) const {
    ProcSet s;
    for (const Response& r : responses_)
        if (std::find(kinds.begin(), kinds.end(), r.kind) != kinds.end()) s.insert(r.node);
    return s;
}

void World::log(std::string line) {
    if (record_trace_) result_.trace.push_back(std::move(line));
}

void World::enqueue(ProcessId src, ProcessId dst, Channel ch, Msg m, std::uint64_t due) {
    Envelope e;
    e.id = next_id_++;
    e.src = src;
    e.dst = dst;
    e.channel = ch;
    e.msg = std::move(m);
    e.enqueued = step_;
    e.due = due;
    if (ch == Channel::Apl) e.seq = link_seq_[{src, dst}]++;
    if (record_trace_) {
        std::string kind = ch == Channel::Request ? "request" : ch == Channel::Timer ? "timer" : "send";
        log("{\"step\":" + std::to_string(step_) + ",\"kind\":\"" + kind + "\",\"id\":" + std::to_string(e.id) +
            ",\"src\":" + std::to_string(src) + ",\"dst\":" + std::to_string(dst) + ",\"chan\":\"" +
            channel_name(ch) + "\",\"msg\":" + e.msg.json() + "}");
    }
    pending_.push_back(std::move(e));
}

void World::tob(ProcessId src, Msg m) {
    std::uint64_t g = tob_seq_++;
    if (record_trace_)
        log("{\"step\":" + std::to_string(step_) + ",\"kind\":\"tob\",\"gseq\":" + std::to_string(g) +
            ",\"src\":" + std::to_string(src) + ",\"msg\":" + m.json() + "}");
    ProcSet targets = node_ids_;
    if (tob_mode_ == TobLiveness::OutlivedOnly) targets &= tob_outlived_;
    for (ProcessId r : targets) {
        Envelope e;
        e.id = next_id_++;
        e.src = src;
        e.dst = r;
        e.channel = Channel::Tob;
        e.msg = m;
        e.seq = g;
        e.enqueued = step_;
        tob_queue_[r].push_back(g);
        pending_.push_back(std::move(e));
    }
}

Signature World::sign_as(ProcessId signer, const std::string& payload) {
    Signature s{signer, fingerprint(payload)};
    signatures_.insert({signer, s.digest});
    if (record_trace_)
        log("{\"step\":" + std::to_string(step_) + ",\"kind\":\"sign\",\"signer\":" + std::to_string(signer) +
            ",\"digest\":" + std::to_string(s.digest) + "}");
    return s;
}

bool World::verify_sig(const Signature& sig, ProcessId signer, const std::string& payload) const {
    return sig.signer == signer && sig.digest == fingerprint(payload) &&
           signatures_.count({signer, sig.digest}) != 0;
}

void World::respond(ProcessId node, const std::string& kind, std::int64_t value) {
    responses_.push_back({step_, node, kind, value});
    if (record_trace_)
        log("{\"step\":" + std::to_string(step_) + ",\"kind\":\"response\",\"node\":" + std::to_string(node) +
            ",\"response\":\"" + kind + "\",\"value\":" + std::to_string(value) + "}");
}

bool World::well_behaved_link(const Envelope& env) const {
    if (env.channel == Channel::Timer) return false;
    return !attack_.is_byzantine(env.src) && !attack_.is_byzantine(env.dst);
}

std::vector<std::size_t> World::eligible() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pending_.size(); ++i) {
        const Envelope& e = pending_[i];
        if (e.channel == Channel::Tob) {
            auto it = tob_queue_.find(e.dst);
            std::size_t pos = tob_next_.count(e.dst) ? tob_next_.at(e.dst) : 0;
            if (it->second[pos] != e.seq) continue;
        }
        if (e.due > step_) continue;
        out.push_back(i);
    }
    if (out.empty() && !pending_.empty()) {
        // Only future timers and requests remain: fast-forward to the earliest.
        std::uint64_t first = std::numeric_limits<std::uint64_t>::max();
        for (const Envelope& e : pending_)
            if (e.due > step_) first = std::min(first, e.due);
        for (std::size_t i = 0; i < pending_.size(); ++i)
            if (pending_[i].due == first) out.push_back(i);
    }
    std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) { return pending_[a].id < pending_[b].id; });
    return out;
}

std::size_t World::choose(const std::vector<std::size_t>& el) {
    if (policy_.mode == ScheduleMode::ScriptedInterleaving) {
        std::size_t k = step_ < policy_.script.size() ? policy_.script[step_] : 0;
        return el[k % el.size()];
    }
    // Fairness: the oldest overdue well-behaved message goes first.
    for (std::size_t i : el) {
        const Envelope& e = pending_[i];
        if (well_behaved_link(e) && step_ - e.enqueued >= policy_.fairness_bound) return i;
    }
    if (policy_.mode == ScheduleMode::AdversarialReorder) {
        // Rush Byzantine traffic, otherwise prefer the newest message.
        std::vector<std::size_t> byz;
        for (std::size_t i : el)
            if (attack_.is_byzantine(pending_[i].src)) byz.push_back(i);
        std::uniform_int_distribution<int> coin(0, 3);
        if (!byz.empty() && coin(sched_rng_) != 0) {
            std::uniform_int_distribution<std::size_t> pick(0, byz.size() - 1);
            return byz[pick(sched_rng_)];
        }
        if (coin(sched_rng_) != 0) return el.back();
    }
    std::uniform_int_distribution<std::size_t> pick(0, el.size() - 1);
    return el[pick(sched_rng_)];
}

void World::deliver(const Envelope& env) {
    if (env.channel == Channel::Tob) ++tob_next_[env.dst];
    if (record_trace_)
        log("{\"step\":" + std::to_string(step_) + ",\"kind\":\"deliver\",\"id\":" + std::to_string(env.id) +
            ",\"src\":" + std::to_string(env.src) + ",\"dst\":" + std::to_string(env.dst) + ",\"chan\":\"" +
            channel_name(env.channel) + "\",\"seq\":" + std::to_string(env.seq) + ",\"msg\":" + env.msg.json() +
            "}");
    if (attack_.is_byzantine(env.dst)) {
        if (adversary_) {
            AdversaryContext actx(*this);
            adversary_->on_deliver(actx, env);
        }
        return;
    }
    Node* n = node(env.dst);
    if (n == nullptr || n->halted()) return;
    Context ctx(*this, env.dst);
    n->on_message(ctx, env);
}

void World::evaluate(const std::vector<std::pair<std::string, Probe>>& probes) {
    for (auto& [name, probe] : probes) {
        std::optional<std::string> bad = probe(*this);
        if (!bad) continue;
        result_.violations.push_back({step_, name, *bad});
        if (record_trace_)
            log("{\"step\":" + std::to_string(step_) + ",\"kind\":\"violation\",\"probe\":\"" + name +
                "\",\"witness\":\"" + *bad + "\"}");
    }
}

RunResult World::run() {
    if (started_) throw Error(ErrorCode::PreconditionViolated, "world already ran");
    started_ = true;
    log("{\"step\":0,\"kind\":\"start\",\"seed\":" + std::to_string(policy_.seed) + ",\"mode\":\"" +
        schedule_mode_name(policy_.mode) + "\",\"byzantine\":" + set_json(attack_.byzantine) +
        ",\"adversary\":\"" + (adversary_ ? adversary_->name() : std::string("none")) + "\"}");
    if (adversary_) {
        AdversaryContext actx(*this);
        adversary_->on_start(actx);
    }
    evaluate(probes_);
    for (;;) {
        std::vector<std::size_t> el = eligible();
        if (el.empty()) {
            result_.outcome = Outcome::Quiescent;
            break;
        }
        if (step_ >= step_cap_) {
            result_.outcome = Outcome::StepCapExceeded;
            break;
        }
        result_.branching.push_back(el.size());
        std::size_t idx = choose(el);
        Envelope env = std::move(pending_[idx]);
        pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(idx));
        ++step_;
        if (env.due > step_) step_ = env.due;
        deliver(env);
        evaluate(probes_);
    }
    if (result_.outcome == Outcome::Quiescent) evaluate(final_probes_);
    log("{\"step\":" + std::to_string(step_) + ",\"kind\":\"end\",\"outcome\":\"" + outcome_name(result_.outcome) +
        "\",\"pending\":" + std::to_string(pending_.size()) + "}");
    result_.steps = step_;
    result_.responses = responses_;
    return std::move(result_);
}

}  // namespace hqs
