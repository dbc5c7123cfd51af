#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hqs/props.hpp"
#include "hqs/quorum_system.hpp"

namespace hqs {

// Maps external ids (integers or strings) to dense process ids. When every
// id is an integer in [0, 64) the mapping is the identity.
class Labels {
public:
    Labels() = default;
    static Labels from_ids(const std::vector<nlohmann::json>& ids);

    bool identity() const { return identity_; }
    ProcessId id(const nlohmann::json& external) const;
    nlohmann::json external(ProcessId p) const;
    std::string name(ProcessId p) const;
    std::vector<std::string> names() const;  // indexed by ProcessId, for DOT output

private:
    bool identity_ = true;
    std::vector<nlohmann::json> table_;  // dense id -> external id
};

struct SystemFile {
    QuorumSystem system;
    Attack attack;
    Labels labels;
};

SystemFile parse_system(const nlohmann::json& j);
SystemFile load_system(const std::string& path);
nlohmann::json read_json_file(const std::string& path);

nlohmann::json system_to_json(const QuorumSystem& qs, const Attack& attack, const Labels& labels = {});
nlohmann::json set_to_json(ProcSet s, const Labels& labels = {});
nlohmann::json quorums_to_json(const QuorumSet& qs, const Labels& labels = {});
ProcSet set_from_json(const nlohmann::json& j, const Labels& labels, const std::string& field);
nlohmann::json report_to_json(const PropertyReport& r, const Labels& labels = {});

// Parses "2,3,5" (or an empty string) into a set, resolving labels.
ProcSet parse_id_list(const std::string& text, const Labels& labels);

}  // namespace hqs
