#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nafl/controller.hpp"
#include "nafl/numerics.hpp"
#include "nafl/registry.hpp"

namespace nafl::sim {

enum class ReferenceKind { Constant, LinearRamp, Sinusoid };

/**
 * Per-output reference trajectory, evaluated at tau = t - t0:
 *
 *   constant     offset
 *   linear-ramp  offset + slope * tau
 *   sinusoid     offset + amplitude * sin(omega * tau + phase)
 */
struct ReferenceSpec {
    ReferenceKind kind = ReferenceKind::Constant;
    Vector offset;
    Vector slope;
    Vector amplitude;
    Vector omega;
    Vector phase;
};

struct ActuatorSpec {
    bool enabled = false;
    Vector tau;                        ///< s, one per control
    std::optional<Vector> rate_limit;  ///< internal units / s
};

struct SaturationSpec {
    bool enabled = false;
    Vector lower; ///< internal units
    Vector upper;
};

struct SummaryOptions {
    double settle_time = 0.0;     ///< "after settle" window starts here (absolute time)
    double vs_threshold = 1e-8;   ///< V_s settle threshold
    double steady_window = 5.0;   ///< trailing window for steady-state means, s
};

/// A fully resolved scenario. All quantities in internal units (radians).
struct ScenarioConfig {
    std::string name;
    std::string plant;
    Vector initial_state;
    Vector initial_controls;
    ReferenceSpec reference;
    control::GainSet gains;
    control::Mode mode = control::Mode::Full;
    double t0 = 0.0;
    double duration = 1.0;
    double dt = 1e-3;
    int decimation = 10;
    plant::PlantParams params;
    ActuatorSpec actuators;
    SaturationSpec saturation;
    double anti_windup = 100.0;
    double divergence_bound = 1e6;
    std::uint64_t seed = 0;
    SummaryOptions summary;

    /// Throws ErrorKind::Configuration on any violated invariant.
    void validate() const;
};

/// Parses "-2", "-2+2i", "-2-2i", "-1.5e-1+0.3j".
std::complex<double> parse_pole(const std::string& text);

/// Reads a scenario from JSON (angles in degrees). Throws ErrorKind::Configuration.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Inverse of parse_scenario: explicit gains, angles in degrees.
nlohmann::json scenario_to_json(const ScenarioConfig& config);

/// Aircraft level-flight route maneuver: start at (0, 0, 1000) m, 50 m/s, level,
/// commands (50 t, 50, 1050) m, u0 = (10 deg, 0 deg, 0.17), 25 s, errors and
/// integral action on.
const nlohmann::json& route_scenario_json();
ScenarioConfig route_scenario();

/// Command-line style overrides.
void disable_integral(ScenarioConfig& config);
void disable_errors(ScenarioConfig& config);

} // namespace nafl::sim
