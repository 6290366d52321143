#include "nafl/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nafl/controller.hpp"
#include "nafl/error.hpp"
#include "nafl/plant.hpp"

namespace nafl::sim {

ReferenceStack reference_signal(const ReferenceSpec& spec, double t0, double t, std::span<const int> alphas) {
    const double tau = t - t0;
    std::vector<std::vector<double>> channels;
    channels.reserve(alphas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        std::vector<double> ch(static_cast<std::size_t>(alphas[i] + 2), 0.0);
        switch (spec.kind) {
            case ReferenceKind::Constant:
                ch[0] = spec.offset(ii);
                break;
            case ReferenceKind::LinearRamp:
                ch[0] = spec.offset(ii) + spec.slope(ii) * tau;
                ch[1] = spec.slope(ii);
                break;
            case ReferenceKind::Sinusoid: {
                const double a = spec.amplitude(ii);
                const double w = spec.omega(ii);
                const double arg = w * tau + spec.phase(ii);
                double wk = 1.0;
                for (std::size_t k = 0; k < ch.size(); ++k) {
                    ch[k] = a * wk * std::sin(arg + static_cast<double>(k) * std::numbers::pi / 2.0);
                    wk *= w;
                }
                ch[0] += spec.offset(ii);
                break;
            }
            default:
                throw Error(ErrorKind::Configuration, "unknown reference kind");
        }
        channels.push_back(std::move(ch));
    }
    return ReferenceStack(std::move(channels));
}

namespace {

struct Layout {
    Eigen::Index n = 0;
    Eigen::Index m = 0;
    bool actuators = false;

    Eigen::Index size() const { return n + 2 * m + (actuators ? m : 0); }
    Eigen::Index u_at() const { return n; }
    Eigen::Index integral_at() const { return n + m; }
    Eigen::Index act_at() const { return n + 2 * m; }
};

struct Evaluation {
    Vector derivative;
    Vector applied;
    Vector e;
    Vector y_ref;
    Vector z;
    Vector h;
    plant::JacobianPair jac;
    control::ControlRate rate;
};

class ClosedLoop {
public:
    explicit ClosedLoop(const ScenarioConfig& c)
        : config_(c), entry_(plant::find_plant(c.plant)) {
        truth_ = entry_.make(c.params);
        plant::PlantParams nominal = c.params;
        nominal.errors = aircraft::ErrorInjection::nominal();
        control_ = c.params.errors.is_nominal() ? truth_ : entry_.make(nominal);
        layout_.n = truth_->state_dim();
        layout_.m = truth_->control_dim();
        layout_.actuators = c.actuators.enabled;
        k_pos_ = control::feedback_matrix(truth_->alphas(), c.gains);
    }

    const plant::SystemModel& truth() const { return *truth_; }
    const plant::SystemModel& control_model() const { return *control_; }
    const Layout& layout() const { return layout_; }
    const plant::PlantEntry& entry() const { return entry_; }

    Vector initial() const {
        Vector s(layout_.size());
        s.segment(0, layout_.n) = config_.initial_state;
        s.segment(layout_.u_at(), layout_.m) = config_.initial_controls;
        s.segment(layout_.integral_at(), layout_.m).setZero();
        if (layout_.actuators) {
            s.segment(layout_.act_at(), layout_.m) = config_.initial_controls;
        }
        return s;
    }

    Evaluation evaluate(double t, const Vector& s) const {
        const auto n = layout_.n;
        const auto m = layout_.m;
        const auto alphas = truth_->alphas();
        const Vector x = s.segment(0, n);
        const Vector u = s.segment(layout_.u_at(), m);
        const Vector integral = s.segment(layout_.integral_at(), m);

        Evaluation ev;
        ev.applied = layout_.actuators ? Vector(s.segment(layout_.act_at(), m)) : u;
        const ReferenceStack ref = reference_signal(config_.reference, config_.t0, t, alphas);

        const Vector xdot = truth_->dynamics(x, ev.applied);
        ev.e = plant::error_coordinates(*truth_, x, ev.applied, ref);
        const Vector e_rate = plant::error_coordinate_rates(*truth_, x, ev.applied, ref);
        Vector y_minus_yr(m);
        ev.y_ref.resize(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            y_minus_yr(i) = ev.e(truth_->block_offset(static_cast<int>(i)));
            ev.y_ref(i) = ref.derivative(static_cast<int>(i), 0);
        }

        ev.z = control::prescribed_z(alphas, ev.e, ref, integral, config_.gains);
        const Vector z_dot = control::zdot(alphas, e_rate, ref, y_minus_yr, config_.gains);
        ev.jac = plant::jacobians(*control_, x, u);
        ev.h = plant::eval_v(*control_, x, u) - ev.z;
        ev.rate = control::control_derivative(ev.jac, ev.h, xdot, z_dot, config_.gains, config_.mode);

        ev.derivative.resize(layout_.size());
        ev.derivative.segment(0, n) = xdot;
        ev.derivative.segment(layout_.u_at(), m) = ev.rate.u_dot;
        ev.derivative.segment(layout_.integral_at(), m) = y_minus_yr;
        if (layout_.actuators) {
            Vector act_rate = (u - ev.applied).cwiseQuotient(config_.actuators.tau);
            if (config_.actuators.rate_limit) {
                act_rate = act_rate.cwiseMax(-*config_.actuators.rate_limit).cwiseMin(*config_.actuators.rate_limit);
            }
            ev.derivative.segment(layout_.act_at(), m) = act_rate;
        }
        return ev;
    }

    /// Smallest scalar k_s meeting the inverse-free gain condition at (x, u); 0 when undefined.
    double gain_bound(const Vector& x, const Vector& u, const plant::JacobianPair& jac) const {
        const Eigen::FullPivLU<Matrix> lu(jac.dv_du);
        if (!lu.isInvertible()) {
            return 0.0;
        }
        const Matrix dstack_dx = numerics::finite_diff_jacobian(
            [&](const Vector& xx) { return control_->derivative_stack(xx, u); }, x);
        const Matrix dz_dx = k_pos_ * dstack_dx;
        const Matrix df_du =
            numerics::finite_diff_jacobian([&](const Vector& uu) { return control_->dynamics(x, uu); }, u);
        const Matrix m_matrix = (jac.dv_dx - dz_dx) * df_du * lu.inverse();
        try {
            return std::max(0.0, control::min_gain_bound(jac.dv_du, m_matrix));
        } catch (const Error&) {
            return 0.0;
        }
    }

    void clamp(Vector& s) const {
        const auto m = layout_.m;
        if (config_.saturation.enabled) {
            auto u = s.segment(layout_.u_at(), m);
            u = u.cwiseMax(config_.saturation.lower).cwiseMin(config_.saturation.upper);
        }
        auto integral = s.segment(layout_.integral_at(), m);
        integral = integral.cwiseMax(-config_.anti_windup).cwiseMin(config_.anti_windup);
        if (layout_.actuators) {
            for (Eigen::Index i = 0; i < m; ++i) {
                const auto& ch = entry_.controls[static_cast<std::size_t>(i)];
                double& v = s(layout_.act_at() + i);
                if (ch.lower) v = std::max(v, *ch.lower);
                if (ch.upper) v = std::min(v, *ch.upper);
            }
        }
    }

    TraceRecord record(double t, const Vector& s) const {
        const auto ev = evaluate(t, s);
        const Vector x = s.segment(0, layout_.n);
        const Vector u = s.segment(layout_.u_at(), layout_.m);
        TraceRecord r;
        r.t = t;
        r.state = x;
        r.actuators = ev.applied;
        r.commanded = u;
        r.y = truth_->output(x);
        r.y_ref = ev.y_ref;
        r.tracking_error = r.y - r.y_ref;
        r.h = ev.h;
        r.v_s = 0.5 * ev.h.squaredNorm();
        r.det_dv_du = ev.rate.det_dv_du;
        r.pinv_active = ev.rate.pseudo_inverse_active;
        r.eq40_bound = gain_bound(x, u, ev.jac);
        r.z = ev.z;
        return r;
    }

private:
    const ScenarioConfig& config_;
    const plant::PlantEntry& entry_;
    plant::ModelPtr truth_;
    plant::ModelPtr control_;
    Layout layout_;
    Matrix k_pos_;
};

} // namespace

RunSummary summarize(const Trace& trace, const SummaryOptions& options) {
    RunSummary s;
    if (trace.records.empty()) {
        return s;
    }
    const auto m = trace.records.front().tracking_error.size();
    s.final_error = trace.records.back().tracking_error;
    s.max_error_after_settle = Vector::Zero(m);
    s.steady_mean_abs_error = Vector::Zero(m);
    const double t_end = trace.records.back().t;
    const double window_start = t_end - options.steady_window;
    int window_count = 0;
    for (const auto& r : trace.records) {
        s.vs_peak = std::max(s.vs_peak, r.v_s);
        if (!s.vs_settle_time && r.v_s < options.vs_threshold) {
            s.vs_settle_time = r.t;
        }
        if (r.t >= options.settle_time) {
            s.max_error_after_settle = s.max_error_after_settle.cwiseMax(r.tracking_error.cwiseAbs());
        }
        if (r.t >= window_start) {
            s.steady_mean_abs_error += r.tracking_error.cwiseAbs();
            s.steady_mean_error_norm += r.tracking_error.norm();
            ++window_count;
        }
    }
    if (window_count > 0) {
        s.steady_mean_abs_error /= window_count;
        s.steady_mean_error_norm /= window_count;
    }
    return s;
}

RunResult run_scenario(const ScenarioConfig& config) {
    config.validate();
    const ClosedLoop loop(config);
    const auto& entry = loop.entry();

    RunResult result;
    result.trace.plant = config.plant;
    result.trace.states = entry.states;
    result.trace.controls = entry.controls;
    result.trace.outputs = entry.outputs;

    const auto steps = static_cast<long>(std::llround(config.duration / config.dt));
    const numerics::Derivative deriv = [&loop](double t, const Vector& s) { return loop.evaluate(t, s).derivative; };

    Vector s = loop.initial();
    loop.clamp(s);
    const auto u_at = loop.layout().u_at();
    const auto m = loop.layout().m;
    bool diverged = false;
    std::string message;
    std::optional<double> divergence_time;

    try {
        for (long i = 0;; ++i) {
            const double t = config.t0 + static_cast<double>(i) * config.dt;
            if (i % config.decimation == 0 || i == steps) {
                result.trace.records.push_back(loop.record(t, s));
            }
            if (i == steps) {
                break;
            }
            Vector next;
            try {
                next = numerics::rk4_step(deriv, s, t, config.dt);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::Evaluation) {
                    throw;
                }
                throw Error(ErrorKind::Divergence, e.what(), t + config.dt);
            }
            loop.clamp(next);
            const double t_next = t + config.dt;
            if (!next.allFinite() || next.segment(u_at, m).norm() > config.divergence_bound ||
                next.head(loop.layout().n).norm() > config.divergence_bound) {
                std::ostringstream msg;
                msg << "state left the divergence bound " << config.divergence_bound << " at t = " << t_next;
                throw Error(ErrorKind::Divergence, msg.str(), t_next);
            }
            s = std::move(next);
        }
    } catch (const Error& ex) {
        if (ex.kind() != ErrorKind::Divergence) {
            throw;
        }
        diverged = true;
        message = ex.what();
        divergence_time = ex.time();
    }

    result.summary = summarize(result.trace, config.summary);
    result.summary.diverged = diverged;
    result.summary.divergence_time = divergence_time;
    result.summary.message = diverged ? message : "completed";
    return result;
}

} // namespace nafl::sim
