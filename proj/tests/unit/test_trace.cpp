#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "nafl/error.hpp"
#include "nafl/scenario.hpp"
#include "nafl/simulate.hpp"
#include "nafl/trace.hpp"
#include "support/gen.hpp"

using namespace nafl;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("nafl_trace_" + name);
}

int line_count(const std::filesystem::path& p) {
    std::ifstream in(p);
    int n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

sim::Trace aircraft_trace() {
    sim::Trace t;
    const auto& entry = plant::find_plant("aircraft-3dof");
    t.plant = entry.name;
    t.states = entry.states;
    t.controls = entry.controls;
    t.outputs = entry.outputs;
    return t;
}

sim::TraceRecord random_record(nafl::testing::Gen& gen, int n, int m) {
    sim::TraceRecord r;
    r.t = gen.uniform(0, 30);
    r.state = gen.vector(n, -1e3, 1e3);
    r.actuators = gen.vector(m, -1, 1);
    r.commanded = gen.vector(m, -1, 1);
    r.y = gen.vector(m, -1e3, 1e3);
    r.y_ref = gen.vector(m, -1e3, 1e3);
    r.tracking_error = gen.vector(m, -1e-9, 1e-9);
    r.h = gen.vector(m, -1, 1);
    r.v_s = gen.uniform(0, 1e-20);
    r.det_dv_du = gen.uniform(-1, 1);
    r.eq40_bound = gen.uniform(0, 1);
    r.pinv_active = gen.coin();
    r.z = gen.vector(m, -1, 1);
    return r;
}

} // namespace

TEST(Trace, AircraftColumnsExactly) {
    const auto table = sim::trace_table(aircraft_trace());
    const std::vector<std::string> expected{
        "t",       "x",       "y",          "h",         "V",          "chi_deg",     "gamma_deg",
        "alpha_cmd_deg", "mu_cmd_deg", "eta_cmd", "alpha_act_deg", "mu_act_deg", "eta_act", "xr",
        "yr",      "hr",      "ex",         "ey",        "eh",         "h1",          "h2",
        "h3",      "Vs",      "det_dvdu",   "eq40_bound", "pinv_active"};
    EXPECT_EQ(table.header, expected);
}

TEST(Trace, GenericPlantReducedColumns) {
    sim::Trace t;
    const auto& entry = plant::find_plant("benchmark-scalar");
    t.plant = entry.name;
    t.states = entry.states;
    t.controls = entry.controls;
    t.outputs = entry.outputs;
    EXPECT_EQ(sim::trace_table(t).header, (std::vector<std::string>{"t", "x", "u", "ey", "Vs"}));
}

TEST(Trace, EmptyAndSingleRecordFiles) {
    auto t = aircraft_trace();
    const auto p = temp_path("empty.csv");
    sim::write_trace(t, p);
    EXPECT_EQ(line_count(p), 1);
    nafl::testing::Gen gen(51);
    t.records.push_back(random_record(gen, 6, 3));
    sim::write_trace(t, p);
    EXPECT_EQ(line_count(p), 2);
    std::filesystem::remove(p);
}

TEST(Trace, AnglesInDegrees) {
    auto t = aircraft_trace();
    nafl::testing::Gen gen(52);
    auto r = random_record(gen, 6, 3);
    r.state(4) = std::numbers::pi / 4;
    r.commanded(0) = std::numbers::pi / 18;
    t.records.push_back(r);
    const auto table = sim::trace_table(t);
    EXPECT_NEAR(table.rows[0][5], 45.0, 1e-12);
    EXPECT_NEAR(table.rows[0][7], 10.0, 1e-12);
}

TEST(TraceProperty, CsvRoundTripIsExact) {
    nafl::testing::Gen gen(53);
    const auto p = temp_path("roundtrip.csv");
    for (int trial = 0; trial < 20; ++trial) {
        auto t = aircraft_trace();
        const int n = gen.integer(0, 30);
        for (int i = 0; i < n; ++i) t.records.push_back(random_record(gen, 6, 3));
        const auto table = sim::trace_table(t);
        sim::write_csv(table, p);
        const auto back = sim::read_csv(p);
        EXPECT_EQ(back.header, table.header);
        ASSERT_EQ(back.rows.size(), table.rows.size());
        for (std::size_t i = 0; i < table.rows.size(); ++i) EXPECT_EQ(back.rows[i], table.rows[i]);
    }
    std::filesystem::remove(p);
}

TEST(Trace, UnwritablePathIsFileError) {
    try {
        sim::write_trace(aircraft_trace(), "/nonexistent-dir/out.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::File);
    }
}
