#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hqs/quorum_system.hpp"

namespace hqs {

enum class Property {
    Consistency,
    Availability,
    AvailableInside,
    Inclusion,
    Sharing,
    Outlived,
    ActiveInclusion,
    ActiveAvailability,
    TentativeInclusion,
};

const char* property_name(Property p);

// Two quorums (of p1 and p2) whose intersection misses the target set.
struct PairWitness {
    ProcessId p1;
    ProcSet q1;
    ProcessId p2;
    ProcSet q2;
};

// A process lacking a suitable quorum.
struct ProcessWitness {
    ProcessId p;
};

// Quorum q of p contains member whose quorums fail the inclusion obligation.
struct MemberWitness {
    ProcessId p;
    ProcSet q;
    ProcessId member;
};

using Witness = std::variant<std::monostate, PairWitness, ProcessWitness, MemberWitness>;

struct PropertyReport {
    Property property;
    bool holds = true;
    Witness witness;

    static PropertyReport ok(Property p) { return {p, true, {}}; }
    static PropertyReport fail(Property p, Witness w) { return {p, false, std::move(w)}; }
    std::string describe() const;
};

// process -> {(requester, quorum)}
using TentativeMap = std::map<ProcessId, std::vector<std::pair<ProcessId, ProcSet>>>;

PropertyReport check_consistency(const QuorumSystem& qs, const Attack& attack, ProcSet at);
// Unchecked variant: quorums of the processes in `over`, intersections measured at `at`.
PropertyReport consistency_raw(const QuorumSystem& qs, ProcSet over, ProcSet at);

PropertyReport check_availability(const QuorumSystem& qs, ProcSet for_P, ProcSet at);
PropertyReport check_available_inside(const QuorumSystem& qs, ProcSet P);
PropertyReport check_active_availability(const QuorumSystem& qs, ProcSet P, ProcSet left);

PropertyReport check_quorum_inclusion(const QuorumSystem& qs, const Attack& attack, ProcSet P);
PropertyReport check_quorum_sharing(const QuorumSystem& qs);
PropertyReport check_tentative_inclusion(const QuorumSystem& qs, const Attack& attack, ProcSet P,
                                         const TentativeMap& tentative);
PropertyReport check_active_inclusion(const QuorumSystem& qs, const Attack& attack, ProcSet P,
                                      ProcSet left);

PropertyReport check_outlived(const QuorumSystem& qs, const Attack& attack, ProcSet O);

inline constexpr int kDefaultOutlivedBound = 12;
std::vector<ProcSet> maximal_outlived_sets(const QuorumSystem& qs, const Attack& attack,
                                           int size_bound = kDefaultOutlivedBound);

// Folds a checker over several attacks; the first failing report wins.
PropertyReport for_all_attacks(const std::vector<Attack>& attacks,
                               const std::function<PropertyReport(const Attack&)>& check);

}  // namespace hqs
