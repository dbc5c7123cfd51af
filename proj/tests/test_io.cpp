#include <doctest.h>

#include <fstream>

#include "support.hpp"

using namespace hqs;
using namespace hqs::testing;
using nlohmann::json;

namespace {

ErrorCode code_of(const json& j) {
    try {
        parse_system(j);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InputError;
}

}  // namespace

TEST_CASE("integer ids map to themselves") {
    auto f = fixture("fig1");
    CHECK(f.labels.identity());
    CHECK(f.attack.byzantine == ProcSet{4});
    CHECK(f.system.universe() == range_set(1, 5));
    CHECK(f.system.active() == range_set(1, 5));
}

TEST_CASE("string ids get dense labels") {
    auto f = fixture("named");
    CHECK_FALSE(f.labels.identity());
    ProcessId alice = f.labels.id("alice");
    ProcessId mallory = f.labels.id("mallory");
    CHECK(f.attack.byzantine == ProcSet::single(mallory));
    CHECK(f.labels.external(alice) == "alice");
    CHECK(f.system.quorums(alice).size() == 2);
    CHECK(parse_id_list("alice, bob", f.labels) == (ProcSet::single(alice) | ProcSet::single(f.labels.id("bob"))));
    CHECK_THROWS_AS(f.labels.id("trent"), Error);
}

TEST_CASE("malformed input is rejected with a field name") {
    CHECK(code_of(json::array()) == ErrorCode::InputError);
    CHECK(code_of(json{{"quorums", 3}}) == ErrorCode::InputError);
    CHECK(code_of(json::parse(R"({"quorums": {"1": [1, 2]}})")) == ErrorCode::InputError);
    CHECK(code_of(json::parse(R"({"quorums": {"1": [[1.5]]}})")) == ErrorCode::InputError);
    CHECK(code_of(json::parse(R"({"quorums": {"1": [[]]}})")) == ErrorCode::EmptyQuorum);
    CHECK(code_of(json::parse(R"({"active": [1, 2], "quorums": {"1": [[1]]}})")) == ErrorCode::EmptyDeclaration);
    CHECK(code_of(json::parse(R"({"universe": [1], "quorums": {"1": [[1, 2]]}})")) == ErrorCode::UnknownMember);
    try {
        parse_system(json::parse(R"({"quorums": {"1": [[1], "x"]}})"));
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("quorums.1") != std::string::npos);
    }
    CHECK_THROWS_AS(load_system("/nonexistent/sys.json"), Error);
}

TEST_CASE("malformed json file reports a position") {
    std::string path = "/tmp/hqs_bad_system.json";
    {
        std::ofstream out(path);
        out << "{\"quorums\": {\"1\": [[1]],}";
    }
    try {
        load_system(path);
        FAIL("accepted bad json");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InputError);
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
}

TEST_CASE("byzantine processes may be undeclared") {
    auto j = json::parse(R"({"byzantine": [3], "active": [1, 2, 3], "quorums": {"1": [[1, 2]], "2": [[1, 2]]}})");
    auto f = parse_system(j);
    CHECK_FALSE(f.system.declared(3));
    CHECK(f.system.active().contains(3));
}

TEST_CASE("round trip load -> save -> load") {
    for (const char* name : {"fig1", "fig2", "fig4_q1", "attack_s5", "dqs", "named", "empty", "singleton", "pbqs"}) {
        CAPTURE(name);
        auto f = fixture(name);
        json once = system_to_json(f.system, f.attack, f.labels);
        auto again = parse_system(once);
        CHECK(system_to_json(again.system, again.attack, again.labels) == once);
        if (f.labels.identity()) {
            CHECK(again.system == f.system);
            CHECK(again.attack.byzantine == f.attack.byzantine);
        }
    }
}

TEST_CASE("reports serialize with witnesses") {
    auto f = fixture("attack_s5");
    json r = report_to_json(check_consistency(f.system, f.attack, f.attack.well_behaved()));
    CHECK(r["property"] == "Consistency");
    CHECK(r["holds"] == false);
    CHECK(r["witness"]["kind"] == "pair");
    json ok = report_to_json(check_consistency(fixture("fig1").system, fixture("fig1").attack, ProcSet{1, 2}));
    CHECK(ok["witness"].is_null());
}
