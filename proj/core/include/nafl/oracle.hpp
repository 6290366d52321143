#pragma once

#include "nafl/numerics.hpp"
#include "nafl/plant.hpp"
#include "nafl/simulate.hpp"

namespace nafl::sim {

/**
 * Root of v(x, u) = z by damped Newton with a finite-difference Jacobian.
 * Converges when |v - z| < 1e-10; gives up after 50 iterations with
 * ErrorKind::OracleFailure.
 */
Vector newton_oracle(const plant::SystemModel& model, const Vector& x, const Vector& z, const Vector& u_guess);

struct OracleComparison {
    double max_deviation = 0.0;  ///< max |u - u_oracle| over compared samples
    int samples = 0;             ///< samples compared (after V_s settles)
    int failures = 0;            ///< samples where the oracle did not converge
    std::optional<double> start_time; ///< first compared sample
};

/**
 * Compares the commanded control against the Newton root of the control
 * model at every trace sample from the first one with V_s below
 * vs_threshold onward.
 */
OracleComparison compare_with_oracle(const ScenarioConfig& config, const Trace& trace, double vs_threshold = 1e-8);

} // namespace nafl::sim
