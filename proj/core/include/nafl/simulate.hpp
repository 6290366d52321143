#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nafl/numerics.hpp"
#include "nafl/reference.hpp"
#include "nafl/registry.hpp"
#include "nafl/scenario.hpp"

namespace nafl::sim {

/// Reference values with derivatives through order alpha_i + 1 at time t.
ReferenceStack reference_signal(const ReferenceSpec& spec, double t0, double t, std::span<const int> alphas);

struct TraceRecord {
    double t = 0.0;
    Vector state;
    Vector actuators;      ///< controls applied to the plant
    Vector commanded;      ///< controller output u
    Vector y;
    Vector y_ref;
    Vector tracking_error; ///< y - y_ref
    Vector h;              ///< v(x, u) - z on the control model
    double v_s = 0.0;
    double det_dv_du = 0.0;
    double eq40_bound = 0.0; ///< smallest scalar k_s meeting the inverse-free gain condition; 0 if undefined
    bool pinv_active = false;
    Vector z;
};

struct Trace {
    std::string plant;
    std::vector<plant::ChannelInfo> states;
    std::vector<plant::ChannelInfo> controls;
    std::vector<std::string> outputs;
    std::vector<TraceRecord> records;
};

struct RunSummary {
    Vector final_error;
    Vector max_error_after_settle;
    std::optional<double> vs_settle_time; ///< first t with V_s < threshold
    double vs_peak = 0.0;
    Vector steady_mean_abs_error;         ///< per output, trailing window
    double steady_mean_error_norm = 0.0;  ///< mean |e| over the trailing window
    bool diverged = false;
    std::optional<double> divergence_time;
    std::string message;
};

struct RunResult {
    Trace trace;
    RunSummary summary;
};

/**
 * Integrates plant state, controller output, integral accumulators and (when
 * enabled) actuator states as one RK4 system. The truth plant carries the
 * configured error injection; the control law evaluates v and dv/du on the
 * nominal model at the commanded controls. Saturation, anti-windup and
 * actuator range clamps are applied between steps.
 *
 * Divergence ends the run with a partial trace and summary.diverged set.
 * Singularity errors propagate.
 */
RunResult run_scenario(const ScenarioConfig& config);

/// Derives the summary from a trace.
RunSummary summarize(const Trace& trace, const SummaryOptions& options);

} // namespace nafl::sim
