#include "hqs/props.hpp"

#include <algorithm>
#include <optional>

namespace hqs {

const char* property_name(Property p) {
    switch (p) {
    case Property::Consistency: return "Consistency";
    case Property::Availability: return "Availability";
    case Property::AvailableInside: return "AvailableInside";
    case Property::Inclusion: return "Inclusion";
    case Property::Sharing: return "Sharing";
    case Property::Outlived: return "Outlived";
    case Property::ActiveInclusion: return "ActiveInclusion";
    case Property::ActiveAvailability: return "ActiveAvailability";
    case Property::TentativeInclusion: return "TentativeInclusion";
    }
    return "Unknown";
}

std::string PropertyReport::describe() const {
    std::string s = std::string(property_name(property)) + (holds ? " holds" : " fails");
    if (auto* w = std::get_if<PairWitness>(&witness)) {
        s += ": " + std::to_string(w->p1) + ":" + w->q1.str() + " vs " + std::to_string(w->p2) + ":" +
             w->q2.str();
    } else if (auto* w = std::get_if<ProcessWitness>(&witness)) {
        s += ": process " + std::to_string(w->p);
    } else if (auto* w = std::get_if<MemberWitness>(&witness)) {
        s += ": member " + std::to_string(w->member) + " of " + std::to_string(w->p) + ":" + w->q.str();
    }
    return s;
}

static void require_well_behaved(const Attack& attack, ProcSet P) {
    if (!P.subset_of(attack.well_behaved()))
        throw Error(ErrorCode::BadSubset, P.str() + " is not a set of well-behaved processes");
}

PropertyReport consistency_raw(const QuorumSystem& qs, ProcSet over, ProcSet at) {
    struct Entry {
        ProcessId p;
        ProcSet q;
        ProcSet inside;
    };
    std::vector<Entry> entries;
    for (auto& [p, Q] : qs.declarations())
        if (over.contains(p))
            for (ProcSet q : Q) entries.push_back({p, q, q & at});
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (std::size_t j = i; j < entries.size(); ++j)
            if (!entries[i].inside.intersects(entries[j].inside))
                return PropertyReport::fail(
                    Property::Consistency,
                    PairWitness{entries[i].p, entries[i].q, entries[j].p, entries[j].q});
    return PropertyReport::ok(Property::Consistency);
}

PropertyReport check_consistency(const QuorumSystem& qs, const Attack& attack, ProcSet at) {
    require_well_behaved(attack, at);
    return consistency_raw(qs, attack.well_behaved(), at);
}

PropertyReport check_availability(const QuorumSystem& qs, ProcSet for_P, ProcSet at) {
    for (ProcessId p : for_P) {
        if (!qs.active().contains(p))
            throw Error(ErrorCode::UnknownProcess, "process " + std::to_string(p) + " is not active");
        const QuorumSet& Q = qs.quorums(p);
        if (std::none_of(Q.begin(), Q.end(), [at](ProcSet q) { return q.subset_of(at); }))
            return PropertyReport::fail(Property::Availability, ProcessWitness{p});
    }
    return PropertyReport::ok(Property::Availability);
}

PropertyReport check_available_inside(const QuorumSystem& qs, ProcSet P) {
    PropertyReport r = check_availability(qs, P, P);
    r.property = Property::AvailableInside;
    return r;
}

PropertyReport check_active_availability(const QuorumSystem& qs, ProcSet P, ProcSet left) {
    for (ProcessId p : P - left) {
        const QuorumSet& Q = qs.quorums(p);
        if (std::none_of(Q.begin(), Q.end(), [&](ProcSet q) { return (q - left).subset_of(P); }))
            return PropertyReport::fail(Property::ActiveAvailability, ProcessWitness{p});
    }
    return PropertyReport::ok(Property::ActiveAvailability);
}

namespace {

// Shared skeleton of the inclusion family: for every well-behaved p, every
// quorum q of p and every member m of q inside P, some candidate quorum of m
// must satisfy `fits(candidate, q)`.
template <typename Candidates, typename Fits>
PropertyReport inclusion_skeleton(Property prop, const QuorumSystem& qs, const Attack& attack,
                                  ProcSet P, Candidates candidates, Fits fits) {
    ProcSet W = attack.well_behaved();
    for (auto& [p, Q] : qs.declarations()) {
        if (!W.contains(p)) continue;
        for (ProcSet q : Q) {
            for (ProcessId m : q & P) {
                bool found = false;
                candidates(m, [&](ProcSet c) {
                    if (!found && fits(c, q)) found = true;
                });
                if (!found) return PropertyReport::fail(prop, MemberWitness{p, q, m});
            }
        }
    }
    return PropertyReport::ok(prop);
}

}  // namespace

PropertyReport check_quorum_inclusion(const QuorumSystem& qs, const Attack& attack, ProcSet P) {
    require_well_behaved(attack, P);
    ProcSet W = attack.well_behaved();
    return inclusion_skeleton(
        Property::Inclusion, qs, attack, P,
        [&](ProcessId m, auto&& visit) {
            for (ProcSet c : qs.quorums(m)) visit(c);
        },
        [W](ProcSet c, ProcSet q) { return (c & W).subset_of(q); });
}

PropertyReport check_tentative_inclusion(const QuorumSystem& qs, const Attack& attack, ProcSet P,
                                         const TentativeMap& tentative) {
    require_well_behaved(attack, P);
    ProcSet W = attack.well_behaved();
    return inclusion_skeleton(
        Property::TentativeInclusion, qs, attack, P,
        [&](ProcessId m, auto&& visit) {
            for (ProcSet c : qs.quorums(m)) visit(c);
            auto it = tentative.find(m);
            if (it != tentative.end())
                for (auto& [requester, c] : it->second) visit(c);
        },
        [W](ProcSet c, ProcSet q) { return (c & W).subset_of(q); });
}

PropertyReport check_active_inclusion(const QuorumSystem& qs, const Attack& attack, ProcSet P,
                                      ProcSet left) {
    require_well_behaved(attack, P);
    ProcSet W = attack.well_behaved();
    return inclusion_skeleton(
        Property::ActiveInclusion, qs, attack, P,
        [&](ProcessId m, auto&& visit) {
            for (ProcSet c : qs.quorums(m)) visit(c);
        },
        [W, left](ProcSet c, ProcSet q) { return ((c & W) - left).subset_of(q); });
}

PropertyReport check_quorum_sharing(const QuorumSystem& qs) {
    for (auto& [p, Q] : qs.declarations()) {
        for (ProcSet q : Q) {
            for (ProcessId m : q) {
                const QuorumSet& Qm = qs.quorums(m);
                if (std::none_of(Qm.begin(), Qm.end(), [q](ProcSet c) { return c.subset_of(q); }))
                    return PropertyReport::fail(Property::Sharing, MemberWitness{p, q, m});
            }
        }
    }
    return PropertyReport::ok(Property::Sharing);
}

PropertyReport check_outlived(const QuorumSystem& qs, const Attack& attack, ProcSet O) {
    require_well_behaved(attack, O);
    if (O.empty()) return PropertyReport::ok(Property::Outlived);  // vacuous: nobody to keep alive
    for (PropertyReport r : {check_consistency(qs, attack, O), check_available_inside(qs, O),
                             check_quorum_inclusion(qs, attack, O)}) {
        if (!r.holds) return PropertyReport::fail(Property::Outlived, r.witness);
    }
    return PropertyReport::ok(Property::Outlived);
}

std::vector<ProcSet> maximal_outlived_sets(const QuorumSystem& qs, const Attack& attack,
                                           int size_bound) {
    ProcSet W = attack.well_behaved();
    if (W.size() > size_bound)
        throw Error(ErrorCode::TooLarge, std::to_string(W.size()) + " well-behaved processes exceed bound " +
                                             std::to_string(size_bound));
    // Only active well-behaved processes can own a quorum, so only they can be
    // available inside a nonempty candidate.
    std::vector<ProcessId> base = (W & qs.active()).members();
    const int n = static_cast<int>(base.size());
    std::vector<ProcSet> candidates;
    candidates.reserve(std::size_t{1} << n);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        ProcSet s;
        for (int i = 0; i < n; ++i)
            if ((mask >> i) & 1u) s.insert(base[i]);
        candidates.push_back(s);
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](ProcSet a, ProcSet b) { return a.size() > b.size(); });

    std::vector<ProcSet> found;
    for (ProcSet s : candidates) {
        if (std::any_of(found.begin(), found.end(), [s](ProcSet f) { return s.subset_of(f); })) continue;
        if (!check_available_inside(qs, s).holds) continue;  // cheap pruning conjunct
        if (check_outlived(qs, attack, s).holds) found.push_back(s);
    }
    std::sort(found.begin(), found.end(), CanonicalLess{});
    return found;
}

PropertyReport for_all_attacks(const std::vector<Attack>& attacks,
                               const std::function<PropertyReport(const Attack&)>& check) {
    std::optional<Property> prop;
    for (const Attack& a : attacks) {
        PropertyReport r = check(a);
        if (!r.holds) return r;
        prop = r.property;
    }
    return PropertyReport::ok(prop.value_or(Property::Consistency));
}

}  // namespace hqs
