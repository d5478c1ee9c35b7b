#include <doctest.h>

#include "ensctrl/system_io.hpp"

using namespace ensctrl;
using nlohmann::json;

namespace {
const char* kValid = R"({
  "parameter": {"name": "beta", "interval": [-1.0, 1.0], "grid": 51},
  "A": [["beta^2"]],
  "B": [["1", "beta"]],
  "x0": ["0"],
  "xF": ["beta"],
  "tolerances": {"rank": 1e-7}
})";
}

TEST_CASE("a valid system description loads") {
    const LoadedSystem s = parse_system(kValid);
    CHECK(s.system.n == 1);
    CHECK(s.system.m == 2);
    CHECK(s.system.param_name == "beta");
    CHECK(s.system.interval.lo == -1.0);
    CHECK(s.config.n_grid == 51);
    CHECK(s.config.tol_rank == 1e-7);
    CHECK(s.system.x0_expr.has_value());
    CHECK(s.input_digest.size() == 16);
    CHECK(s.input_digest == parse_system(kValid).input_digest);
    const SampledField b = s.system.sample_b(11);
    CHECK(b.value(10)(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("schema errors identify the offending location") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_system(text);
            FAIL_CHECK("expected SchemaError for ", needle);
        } catch (const SchemaError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("{", "invalid JSON");
    expect_error(R"({"A": [["beta"]], "B": [["1"]]})", "/parameter");
    expect_error(R"({"parameter": {"name": "beta", "interval": [1, -1]}, "A": [["beta"]], "B": [["1"]]})",
                 "/parameter/interval");
    expect_error(R"({"parameter": {"name": "beta", "interval": [0, 1]}, "B": [["1"]]})", "/A");
    expect_error(R"({"parameter": {"name": "beta", "interval": [0, 1]}, "A": [["beta", "0"]], "B": [["1"]]})",
                 "square");
    expect_error(R"({"parameter": {"name": "beta", "interval": [0, 1]}, "A": [["beta"]], "B": [["1"], ["2"]]})",
                 "/B");
    expect_error(R"({"parameter": {"name": "beta", "interval": [0, 1]}, "A": [["bogus"]], "B": [["1"]]})",
                 "/A/0/0");
    expect_error(R"({"parameter": {"name": "beta", "interval": [0, 1]}, "A": [["beta"]], "B": [["1"]], "x0": ["0", "0"]})",
                 "/x0");
}

TEST_CASE("schedules round-trip through json") {
    ControlSchedule s{2.0, 3, Eigen::MatrixXd(3, 2)};
    s.values << 1, 2, 3, 4, 5, 6;
    const ControlSchedule back = schedule_from_json(schedule_to_json(s));
    CHECK(back.horizon == 2.0);
    CHECK(back.segments == 3);
    CHECK((back.values - s.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(schedule_from_json(json{{"T", 1.0}}), SchemaError);
    CHECK_THROWS_AS(
        schedule_from_json(json{{"T", 1.0}, {"P", 2}, {"values", json::array({json::array({1.0})})}}),
        SchemaError);
}

TEST_CASE("verdict serialization carries evidence and configuration") {
    Verdict v;
    v.status = Status::NotControllable;
    v.evidence.push_back({Reason::GramianRankDeficient, {0.5}, {2}, 1, 2, "rank drop"});
    const json j = verdict_to_json(v);
    CHECK(j.at("status") == "NotControllable");
    CHECK(j.at("evidence").at(0).at("reason") == "GramianRankDeficient");
    CHECK(j.at("evidence").at(0).at("rank") == 1);
    CHECK(j.at("config").at("grid") == 201);
}
