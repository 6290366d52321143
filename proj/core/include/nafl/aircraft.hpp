#pragma once

#include <optional>
#include <vector>

#include "nafl/numerics.hpp"
#include "nafl/plant.hpp"

namespace nafl::aircraft {

/// Point-mass trajectory state. Angles in radians.
struct AircraftState {
    double x = 0.0;     ///< m
    double y = 0.0;     ///< m
    double h = 0.0;     ///< m
    double V = 0.0;     ///< m/s
    double chi = 0.0;   ///< heading angle, rad
    double gamma = 0.0; ///< flight-path angle, rad

    Vector to_vector() const;
    static AircraftState from_vector(const Vector& s);
};

/// Outer-loop command triplet.
struct AircraftControls {
    double alpha = 0.0; ///< angle of attack, rad
    double mu = 0.0;    ///< velocity bank angle, rad
    double eta = 0.0;   ///< throttle T / T_max

    Vector to_vector() const;
    static AircraftControls from_vector(const Vector& u);
};

/**
 * Aerodynamic and propulsion constants. CL = CL0 + CL_alpha * alpha,
 * CD = CD0 + k_induced * CL^2, constant air density.
 */
struct AeroModel {
    double mass = 5000.0;     ///< kg
    double S = 40.0;          ///< m^2
    double T_max = 30000.0;   ///< N
    double g = 9.81;          ///< m/s^2
    double rho = 1.112;       ///< kg/m^3
    double CL0 = 0.2;
    double CL_alpha = 4.5;    ///< 1/rad
    double CD0 = 0.025;
    double k_induced = 0.06;

    /// Throws ErrorKind::Configuration if any constant is out of range.
    void validate() const;
};

/// Truth-model deviations from the nominal AeroModel.
struct ErrorInjection {
    double thrust_scale = 1.0;
    double CL_scale = 1.0;
    double CD_scale = 1.0;
    double side_force_bias = 0.0; ///< N, lumped sideslip / off-axis thrust effects

    static ErrorInjection nominal() { return {}; }
    /// Default robustness case: 10% thrust shortfall, 10% lift and drag excess.
    static ErrorInjection robustness_default() { return {0.9, 1.1, 1.1, 0.0}; }
    void validate() const;
    bool is_nominal() const noexcept;
};

struct Forces {
    double lift = 0.0;
    double drag = 0.0;
    double thrust = 0.0;
};

Forces forces(const AircraftState& s, const AircraftControls& u, const AeroModel& aero, const ErrorInjection& err);

/// (x', y', h', V', chi', gamma'). Throws ErrorKind::Singularity near |gamma| = pi/2 or for V <= 0.
Vector state_derivative(const AircraftState& s, const AircraftControls& u, const AeroModel& aero,
                        const ErrorInjection& err);

/// Inertial accelerations (x'', y'', h'').
Vector v_aircraft(const AircraftState& s, const AircraftControls& u, const AeroModel& aero, const ErrorInjection& err);

/// d v_aircraft / d (alpha, mu, eta).
Matrix jac_v_controls(const AircraftState& s, const AircraftControls& u, const AeroModel& aero,
                      const ErrorInjection& err);

/// d v_aircraft / d (x, y, h, V, chi, gamma).
Matrix jac_v_state(const AircraftState& s, const AircraftControls& u, const AeroModel& aero, const ErrorInjection& err);

/// Position and inertial velocity stack [x, x', y, y', h, h'].
Vector position_stack(const AircraftState& s);

struct ActuatorChannel {
    double value = 0.0;
    double tau = 0.1;                  ///< s
    std::optional<double> rate_limit;  ///< units/s
    std::optional<double> lower;
    std::optional<double> upper;
};

/// First-order actuator lags, one channel per control.
struct ActuatorBank {
    std::vector<ActuatorChannel> channels;

    Vector values() const;
};

/// Aircraft defaults: tau = 0.1 s for alpha and mu, 0.5 s for throttle; throttle range [0, 1].
ActuatorBank default_actuators(const AircraftControls& initial);

/// Exact zero-order-hold update u <- cmd + (u - cmd) exp(-dt / tau), then rate and range clamps.
ActuatorBank actuator_step(const ActuatorBank& bank, const Vector& commands, double dt);
ActuatorBank actuator_step(const ActuatorBank& bank, const AircraftControls& commands, double dt);

struct Trim {
    double alpha = 0.0; ///< rad
    double eta = 0.0;
};

/**
 * Wings-level, constant-altitude equilibrium at airspeed V. Damped Newton on
 * (axial force, normal force - weight). Throws ErrorKind::Trim if the solution
 * leaves alpha in (-5 deg, 20 deg), eta in (0, 1).
 */
Trim trim_level_flight(double V, double h, const AeroModel& aero, const ErrorInjection& err = {});

/// SystemModel for (x, y, h, V, chi, gamma) with controls (alpha, mu, eta) and
/// position outputs, each of relative degree 2. Provides analytic Jacobians.
plant::ModelPtr make_aircraft_model(const AeroModel& aero, const ErrorInjection& err);

} // namespace nafl::aircraft
