#include "hqs/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hqs {

using nlohmann::json;

static bool is_small_int(const json& j) {
    return j.is_number_integer() && j.get<long long>() >= 0 && j.get<long long>() < kMaxProcesses;
}

static bool external_less(const json& a, const json& b) {
    if (a.is_number_integer() != b.is_number_integer()) return a.is_number_integer();
    if (a.is_number_integer()) return a.get<long long>() < b.get<long long>();
    return a.get<std::string>() < b.get<std::string>();
}

Labels Labels::from_ids(const std::vector<json>& ids) {
    Labels l;
    for (const json& j : ids)
        if (!j.is_number_integer() && !j.is_string())
            throw Error(ErrorCode::InputError, "process id must be an integer or a string: " + j.dump());
    l.identity_ = std::all_of(ids.begin(), ids.end(), is_small_int);
    if (l.identity_) return l;
    std::vector<json> sorted = ids;
    std::sort(sorted.begin(), sorted.end(), external_less);
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() > static_cast<std::size_t>(kMaxProcesses))
        throw Error(ErrorCode::TooLarge, "more than 64 distinct processes");
    l.table_ = std::move(sorted);
    return l;
}

ProcessId Labels::id(const json& external) const {
    if (identity_) {
        if (!is_small_int(external))
            throw Error(ErrorCode::InputError, "unknown process id " + external.dump());
        return external.get<int>();
    }
    for (std::size_t i = 0; i < table_.size(); ++i)
        if (table_[i] == external) return static_cast<ProcessId>(i);
    throw Error(ErrorCode::InputError, "unknown process id " + external.dump());
}

json Labels::external(ProcessId p) const {
    if (identity_ || p < 0 || p >= static_cast<int>(table_.size())) return p;
    return table_[p];
}

std::string Labels::name(ProcessId p) const {
    json e = external(p);
    return e.is_string() ? e.get<std::string>() : e.dump();
}

std::vector<std::string> Labels::names() const {
    std::vector<std::string> out;
    for (ProcessId p = 0; p < kMaxProcesses; ++p) out.push_back(name(p));
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InputError, "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InputError, path + ": " + e.what());
    }
}

static void collect_ids(const json& j, const char* field, std::vector<json>& out) {
    if (!j.contains(field)) return;
    if (!j[field].is_array()) throw Error(ErrorCode::InputError, std::string("field '") + field + "' must be an array");
    for (const json& id : j[field]) out.push_back(id);
}

ProcSet set_from_json(const json& j, const Labels& labels, const std::string& field) {
    if (!j.is_array()) throw Error(ErrorCode::InputError, "field '" + field + "' must be an array of ids");
    ProcSet s;
    for (const json& id : j) {
        try {
            s.insert(labels.id(id));
        } catch (const Error& e) {
            throw Error(ErrorCode::InputError, "field '" + field + "': " + e.what());
        }
    }
    return s;
}

SystemFile parse_system(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InputError, "system must be a JSON object");
    if (!j.contains("quorums") || !j["quorums"].is_object())
        throw Error(ErrorCode::InputError, "field 'quorums' must be an object");

    // Gather every id mentioned anywhere to build the label table.
    std::vector<json> ids;
    collect_ids(j, "universe", ids);
    collect_ids(j, "byzantine", ids);
    collect_ids(j, "active", ids);
    for (auto& [key, qs] : j["quorums"].items()) {
        json k;
        try {
            k = json::parse(key);
            if (!k.is_number_integer()) k = key;
        } catch (const json::parse_error&) {
            k = key;
        }
        ids.push_back(k);
        if (!qs.is_array())
            throw Error(ErrorCode::InputError, "field 'quorums." + key + "' must be an array of arrays");
        for (const json& q : qs) {
            if (!q.is_array())
                throw Error(ErrorCode::InputError, "field 'quorums." + key + "' must be an array of arrays");
            for (const json& m : q) ids.push_back(m);
        }
    }

    SystemFile f;
    f.labels = Labels::from_ids(ids);
    auto key_id = [&](const std::string& key) {
        json k;
        try {
            k = json::parse(key);
            if (!k.is_number_integer()) k = key;
        } catch (const json::parse_error&) {
            k = key;
        }
        return f.labels.id(k);
    };

    Declarations decls;
    ProcSet members;
    for (auto& [key, qs] : j["quorums"].items()) {
        ProcessId p = key_id(key);
        QuorumSet Q;
        for (const json& q : qs) {
            ProcSet s = set_from_json(q, f.labels, "quorums." + key);
            if (s.empty()) throw Error(ErrorCode::EmptyQuorum, "empty quorum in 'quorums." + key + "'");
            Q.push_back(s);
            members |= s;
        }
        decls[p] = std::move(Q);
    }
    ProcSet declared;
    for (auto& [p, Q] : decls) declared.insert(p);

    ProcSet byz = j.contains("byzantine") ? set_from_json(j["byzantine"], f.labels, "byzantine") : ProcSet{};
    ProcSet active = j.contains("active") ? set_from_json(j["active"], f.labels, "active") : declared;
    ProcSet universe = j.contains("universe") ? set_from_json(j["universe"], f.labels, "universe")
                                              : (active | members | byz | declared);

    f.attack = Attack::make(universe, byz);
    f.system = QuorumSystem::make(universe, active, std::move(decls), active - byz);
    return f;
}

SystemFile load_system(const std::string& path) {
    try {
        return parse_system(read_json_file(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InputError) throw;
        throw Error(e.code(), path + ": " + e.what());
    }
}

json set_to_json(ProcSet s, const Labels& labels) {
    json a = json::array();
    std::vector<json> items;
    for (ProcessId p : s) items.push_back(labels.external(p));
    for (auto& i : items) a.push_back(i);
    return a;
}

json quorums_to_json(const QuorumSet& qs, const Labels& labels) {
    json a = json::array();
    for (ProcSet q : qs) a.push_back(set_to_json(q, labels));
    return a;
}

json system_to_json(const QuorumSystem& qs, const Attack& attack, const Labels& labels) {
    json j;
    j["universe"] = set_to_json(qs.universe() | attack.universe, labels);
    j["byzantine"] = set_to_json(attack.byzantine, labels);
    j["active"] = set_to_json(qs.active(), labels);
    json q = json::object();
    for (auto& [p, Q] : qs.declarations()) q[labels.name(p)] = quorums_to_json(Q, labels);
    j["quorums"] = q;
    return j;
}

json report_to_json(const PropertyReport& r, const Labels& labels) {
    json j;
    j["property"] = property_name(r.property);
    j["holds"] = r.holds;
    if (auto* w = std::get_if<PairWitness>(&r.witness)) {
        j["witness"] = {{"kind", "pair"},
                        {"p1", labels.external(w->p1)},
                        {"q1", set_to_json(w->q1, labels)},
                        {"p2", labels.external(w->p2)},
                        {"q2", set_to_json(w->q2, labels)}};
    } else if (auto* w = std::get_if<ProcessWitness>(&r.witness)) {
        j["witness"] = {{"kind", "process"}, {"p", labels.external(w->p)}};
    } else if (auto* w = std::get_if<MemberWitness>(&r.witness)) {
        j["witness"] = {{"kind", "member"},
                        {"p", labels.external(w->p)},
                        {"q", set_to_json(w->q, labels)},
                        {"member", labels.external(w->member)}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

ProcSet parse_id_list(const std::string& text, const Labels& labels) {
    ProcSet s;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(" \t"));
        tok.erase(tok.find_last_not_of(" \t") + 1);
        if (tok.empty()) continue;
        json id;
        bool numeric = std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
        if (numeric) id = std::stoll(tok);
        else id = tok;
        s.insert(labels.id(id));
    }
    return s;
}

}  // namespace hqs
