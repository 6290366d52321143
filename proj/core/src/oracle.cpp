#include "nafl/oracle.hpp"

#include <sstream>

#include "nafl/error.hpp"

namespace nafl::sim {

Vector newton_oracle(const plant::SystemModel& model, const Vector& x, const Vector& z, const Vector& u_guess) {
    constexpr double kTolerance = 1e-10;
    constexpr int kMaxIterations = 50;

    const auto residual = [&](const Vector& u) { return Vector(model.v(x, u) - z); };
    Vector u = u_guess;
    Vector h = residual(u);
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        if (!h.allFinite()) {
            break;
        }
        const double norm = h.norm();
        if (norm < kTolerance) {
            return u;
        }
        const Matrix j = numerics::finite_diff_jacobian(residual, u);
        const Vector step = numerics::pseudo_inverse(j) * h;
        double lambda = 1.0;
        Vector trial = u - step;
        Vector trial_h = residual(trial);
        while (!(trial_h.allFinite() && trial_h.norm() < norm) && lambda > 1e-6) {
            lambda *= 0.5;
            trial = u - lambda * step;
            trial_h = residual(trial);
        }
        u = std::move(trial);
        h = std::move(trial_h);
    }
    if (h.allFinite() && h.norm() < kTolerance) {
        return u;
    }
    std::ostringstream msg;
    msg << "Newton oracle did not converge (|h| = " << h.norm() << ")";
    throw Error(ErrorKind::OracleFailure, msg.str());
}

OracleComparison compare_with_oracle(const ScenarioConfig& config, const Trace& trace, double vs_threshold) {
    plant::PlantParams nominal = config.params;
    nominal.errors = aircraft::ErrorInjection::nominal();
    const auto model = plant::find_plant(config.plant).make(nominal);

    OracleComparison out;
    for (const auto& r : trace.records) {
        if (!out.start_time) {
            if (r.v_s >= vs_threshold) {
                continue;
            }
            out.start_time = r.t;
        }
        try {
            const Vector u_s = newton_oracle(*model, r.state, r.z, r.commanded);
            out.max_deviation = std::max(out.max_deviation, (r.commanded - u_s).norm());
            ++out.samples;
        } catch (const Error& ex) {
            if (ex.kind() != ErrorKind::OracleFailure) {
                throw;
            }
            ++out.failures;
        }
    }
    return out;
}

} // namespace nafl::sim
