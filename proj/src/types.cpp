#include "hqs/types.hpp"

#include <algorithm>

namespace hqs {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::EmptyQuorum: return "EmptyQuorum";
    case ErrorCode::EmptyDeclaration: return "EmptyDeclaration";
    case ErrorCode::UnknownMember: return "UnknownMember";
    case ErrorCode::UnknownProcess: return "UnknownProcess";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::BadSubset: return "BadSubset";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::PreconditionNotVerified: return "PreconditionNotVerified";
    case ErrorCode::ForgedSender: return "ForgedSender";
    case ErrorCode::ForgedSigner: return "ForgedSigner";
    case ErrorCode::InputError: return "InputError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

static void check_range(ProcessId p) {
    if (p < 0 || p >= kMaxProcesses)
        throw Error(ErrorCode::InputError, "process id out of range: " + std::to_string(p));
}

ProcSet::ProcSet(std::initializer_list<ProcessId> ids) {
    for (ProcessId p : ids) insert(p);
}

ProcSet ProcSet::of(const std::vector<ProcessId>& ids) {
    ProcSet s;
    for (ProcessId p : ids) s.insert(p);
    return s;
}

ProcSet ProcSet::single(ProcessId p) {
    ProcSet s;
    s.insert(p);
    return s;
}

void ProcSet::insert(ProcessId p) {
    check_range(p);
    bits_ |= std::uint64_t{1} << p;
}

void ProcSet::erase(ProcessId p) {
    if (p >= 0 && p < kMaxProcesses) bits_ &= ~(std::uint64_t{1} << p);
}

std::vector<ProcessId> ProcSet::members() const {
    std::vector<ProcessId> out;
    out.reserve(size());
    for (ProcessId p : *this) out.push_back(p);
    return out;
}

std::string ProcSet::str() const {
    std::string s = "{";
    bool first = true;
    for (ProcessId p : *this) {
        if (!first) s += ',';
        s += std::to_string(p);
        first = false;
    }
    return s + "}";
}

bool canonical_less(ProcSet a, ProcSet b) {
    auto ia = a.begin(), ib = b.begin();
    for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
        if (*ia != *ib) return *ia < *ib;
    }
    return ia == a.end() && ib != b.end();
}

QuorumSet normalize(QuorumSet qs) {
    std::sort(qs.begin(), qs.end(), CanonicalLess{});
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    QuorumSet out;
    out.reserve(qs.size());
    for (ProcSet q : qs) {
        bool dominated = std::any_of(qs.begin(), qs.end(),
                                     [q](ProcSet o) { return o.strict_subset_of(q); });
        if (!dominated) out.push_back(q);
    }
    return out;
}

bool is_antichain(const QuorumSet& qs) {
    for (ProcSet a : qs)
        for (ProcSet b : qs)
            if (a.strict_subset_of(b)) return false;
    return true;
}

ProcSet union_of(const QuorumSet& qs) {
    ProcSet u;
    for (ProcSet q : qs) u |= q;
    return u;
}

bool contains_quorum(const QuorumSet& qs, ProcSet q) {
    return std::find(qs.begin(), qs.end(), q) != qs.end();
}

std::string quorums_str(const QuorumSet& qs) {
    std::string s = "{";
    for (std::size_t i = 0; i < qs.size(); ++i) {
        if (i) s += ',';
        s += qs[i].str();
    }
    return s + "}";
}

}  // namespace hqs
