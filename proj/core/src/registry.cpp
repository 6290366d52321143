#include "nafl/registry.hpp"

#include <numbers>

#include "nafl/error.hpp"

namespace nafl::plant {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

ChannelInfo state(std::string name, bool is_angle = false) {
    ChannelInfo ch;
    ch.name = std::move(name);
    ch.is_angle = is_angle;
    return ch;
}

std::vector<PlantEntry> build_registry() {
    std::vector<PlantEntry> entries;

    PlantEntry bench;
    bench.name = "benchmark-scalar";
    bench.description = "x' = -x + u + u^3, y = x (non-affine, relative degree 1)";
    bench.states = {state("x")};
    bench.controls = {state("u")};
    bench.outputs = {"y"};
    bench.default_k_s = 10.0;
    bench.make = [](const PlantParams&) { return make_benchmark_scalar(); };
    entries.push_back(std::move(bench));

    PlantEntry ac;
    ac.name = "aircraft-3dof";
    ac.description = "point-mass trajectory model, controls (alpha, mu, eta), position outputs";
    ac.states = {state("x"), state("y"), state("h"), state("V"), state("chi", true), state("gamma", true)};
    ac.controls = {
        {"alpha", true, -5.0 * kDeg, 20.0 * kDeg, 0.1},
        {"mu", true, -60.0 * kDeg, 60.0 * kDeg, 0.1},
        {"eta", false, 0.0, 1.0, 0.5},
    };
    ac.outputs = {"x", "y", "h"};
    // k_s * sigma_max(dv/du)^2 * dt must stay inside the RK4 stability region at dt = 1e-3.
    ac.default_k_s = 0.2;
    ac.full_trace = true;
    ac.make = [](const PlantParams& p) { return aircraft::make_aircraft_model(p.aero, p.errors); };
    entries.push_back(std::move(ac));

    return entries;
}

} // namespace

const std::vector<PlantEntry>& plant_registry() {
    static const std::vector<PlantEntry> registry = build_registry();
    return registry;
}

const PlantEntry& find_plant(const std::string& name) {
    for (const auto& entry : plant_registry()) {
        if (entry.name == name) {
            return entry;
        }
    }
    throw Error(ErrorKind::Configuration, "unknown plant '" + name + "'");
}

} // namespace nafl::plant
