#include <numbers>

#include <gtest/gtest.h>

#include "nafl/error.hpp"
#include "nafl/scenario.hpp"

using namespace nafl;
using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

json benchmark_doc() {
    return json::parse(R"({
      "plant": "benchmark-scalar",
      "initial_state": [0.0],
      "initial_controls": [0.0],
      "reference": {"kind": "constant", "offset": [1.0]},
      "gains": {"poles": [[-2.0]]},
      "duration": 1.0
    })");
}

ErrorKind kind_of(const json& doc) {
    try {
        sim::parse_scenario(doc);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::OracleFailure;
}

} // namespace

TEST(ParsePole, Forms) {
    EXPECT_EQ(sim::parse_pole("-2"), std::complex<double>(-2.0, 0.0));
    EXPECT_EQ(sim::parse_pole("-2+2i"), std::complex<double>(-2.0, 2.0));
    EXPECT_EQ(sim::parse_pole(" -1.5e-1 - 0.3j "), std::complex<double>(-0.15, -0.3));
    EXPECT_EQ(sim::parse_pole("-1-i"), std::complex<double>(-1.0, -1.0));
    EXPECT_THROW(sim::parse_pole("abc"), Error);
    EXPECT_THROW(sim::parse_pole("-1+"), Error);
}

TEST(Scenario, RouteDefaults) {
    const auto c = sim::route_scenario();
    EXPECT_EQ(c.plant, "aircraft-3dof");
    EXPECT_NEAR(c.initial_controls(0), 10 * kDeg, 1e-15);
    EXPECT_EQ(c.initial_controls(1), 0.0);
    EXPECT_EQ(c.initial_controls(2), 0.17);
    EXPECT_EQ(c.initial_state(2), 1000.0);
    EXPECT_EQ(c.initial_state(3), 50.0);
    EXPECT_EQ(c.reference.kind, sim::ReferenceKind::LinearRamp);
    EXPECT_EQ(c.reference.slope(0), 50.0);
    EXPECT_EQ(c.reference.offset(1), 50.0);
    EXPECT_EQ(c.reference.offset(2), 1050.0);
    EXPECT_EQ(c.duration, 25.0);
    EXPECT_EQ(c.dt, 1e-3);
    EXPECT_TRUE(c.actuators.enabled);
    EXPECT_TRUE(c.saturation.enabled);
    EXPECT_NEAR(c.saturation.upper(0), 20 * kDeg, 1e-15);
    EXPECT_EQ(c.params.errors.thrust_scale, 0.9);
}

TEST(Scenario, PolesAndDefaultGain) {
    const auto c = sim::parse_scenario(benchmark_doc());
    EXPECT_EQ(c.gains.k_blocks[0][0], 2.0);
    EXPECT_EQ(c.gains.k_s(0, 0), 10.0);
    EXPECT_FALSE(c.actuators.enabled);
    EXPECT_FALSE(c.saturation.enabled);
    EXPECT_NEAR(c.summary.settle_time, 0.8, 1e-15);
}

TEST(Scenario, InvariantViolationsAreConfigurationErrors) {
    auto doc = benchmark_doc();
    doc["dt"] = 0.05;
    EXPECT_EQ(kind_of(doc), ErrorKind::Configuration);
    doc = benchmark_doc();
    doc["duration"] = 0.0;
    EXPECT_EQ(kind_of(doc), ErrorKind::Configuration);
    doc = benchmark_doc();
    doc["plant"] = "glider";
    EXPECT_EQ(kind_of(doc), ErrorKind::Configuration);
    doc = benchmark_doc();
    doc["initial_state"] = json::array({0.0, 1.0});
    EXPECT_EQ(kind_of(doc), ErrorKind::Configuration);
    doc = benchmark_doc();
    doc["reference"]["kind"] = "parabola";
    EXPECT_EQ(kind_of(doc), ErrorKind::Configuration);
    doc = benchmark_doc();
    doc["gains"]["poles"] = json::array({json::array({1.0})});
    EXPECT_EQ(kind_of(doc), ErrorKind::Configuration);
    doc = benchmark_doc();
    doc["gains"]["k"] = json::array({json::array({1.0})});
    EXPECT_EQ(kind_of(doc), ErrorKind::Configuration);
    doc = benchmark_doc();
    doc["mode"] = "turbo";
    EXPECT_EQ(kind_of(doc), ErrorKind::Configuration);
    doc = benchmark_doc();
    doc["duration"] = "long";
    EXPECT_EQ(kind_of(doc), ErrorKind::Configuration);
}

TEST(Scenario, JsonRoundTrip) {
    const auto c = sim::route_scenario();
    const auto again = sim::parse_scenario(sim::scenario_to_json(c));
    EXPECT_EQ(sim::scenario_to_json(again), sim::scenario_to_json(c));
    EXPECT_TRUE(again.initial_controls.isApprox(c.initial_controls, 1e-15));
    EXPECT_EQ(again.gains.k_blocks, c.gains.k_blocks);
}

TEST(Scenario, Overrides) {
    auto c = sim::route_scenario();
    sim::disable_integral(c);
    sim::disable_errors(c);
    EXPECT_EQ(c.gains.k_integral, (std::vector<double>{0.0, 0.0, 0.0}));
    EXPECT_TRUE(c.params.errors.is_nominal());
}

TEST(Scenario, MissingFileIsConfigurationError) {
    try {
        sim::load_scenario("/nonexistent/scenario.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Configuration);
    }
}
