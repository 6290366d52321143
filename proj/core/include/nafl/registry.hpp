#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nafl/aircraft.hpp"
#include "nafl/plant.hpp"

namespace nafl::plant {

/// Describes one state or control channel for config files and traces.
struct ChannelInfo {
    std::string name;
    bool is_angle = false; ///< degrees in config and CSV, radians internally
    std::optional<double> lower; ///< default saturation (controls only), internal units
    std::optional<double> upper;
    double tau = 0.1;            ///< default actuator time constant (controls only), s
};

/// Parameters a plant factory may use. Generic plants ignore the aero fields.
struct PlantParams {
    aircraft::AeroModel aero;
    aircraft::ErrorInjection errors;
};

struct PlantEntry {
    std::string name;
    std::string description;
    std::vector<ChannelInfo> states;
    std::vector<ChannelInfo> controls;
    std::vector<std::string> outputs;
    double default_k_s = 1.0; ///< scalar descent gain used when a config omits k_s
    bool full_trace = false;  ///< emit actuator, reference and diagnostic columns
    std::function<ModelPtr(const PlantParams&)> make;
};

/// Built-in plants: "benchmark-scalar" and "aircraft-3dof".
const std::vector<PlantEntry>& plant_registry();

/// Throws ErrorKind::Configuration for unknown names.
const PlantEntry& find_plant(const std::string& name);

} // namespace nafl::plant
