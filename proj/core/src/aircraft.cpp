#include "nafl/aircraft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nafl/error.hpp"

namespace nafl::aircraft {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kGammaSingularTol = 1e-6;

void check_state(const AircraftState& s) {
    if (!(s.V > 0.0) || !std::isfinite(s.V)) {
        std::ostringstream msg;
        msg << "airspeed must be positive, got V = " << s.V;
        throw Error(ErrorKind::Singularity, msg.str());
    }
    if (!(std::abs(s.gamma) < std::numbers::pi / 2 - kGammaSingularTol)) {
        std::ostringstream msg;
        msg << "flight-path angle " << s.gamma / kDeg << " deg is at the vertical singularity";
        throw Error(ErrorKind::Singularity, msg.str());
    }
}

/// Direction cosines of the velocity, lift and side axes in the (x, y, h) frame.
struct Axes {
    Eigen::Vector3d t; // along velocity
    Eigen::Vector3d n; // lift direction (bank about velocity)
    Eigen::Vector3d s; // side-force direction, d n / d mu
};

Axes axes(double chi, double gamma, double mu) {
    const double cc = std::cos(chi), sc = std::sin(chi);
    const double cg = std::cos(gamma), sg = std::sin(gamma);
    const double cm = std::cos(mu), sm = std::sin(mu);
    Axes a;
    a.t << cg * cc, cg * sc, sg;
    a.n << -sg * cc * cm - sc * sm, -sg * sc * cm + cc * sm, cg * cm;
    a.s << sg * cc * sm - sc * cm, sg * sc * sm + cc * cm, -cg * sm;
    return a;
}

struct ForceTerms {
    double axial;  // -D + T cos(alpha)
    double normal; // L + T sin(alpha)
    double lift;
    double drag;
    double thrust;
    double cl;     // unscaled lift coefficient
    double qs;     // dynamic pressure times area
};

ForceTerms force_terms(const AircraftState& s, const AircraftControls& u, const AeroModel& aero,
                       const ErrorInjection& err) {
    ForceTerms f{};
    f.qs = 0.5 * aero.rho * s.V * s.V * aero.S;
    f.cl = aero.CL0 + aero.CL_alpha * u.alpha;
    const double cd = aero.CD0 + aero.k_induced * f.cl * f.cl;
    f.lift = f.qs * f.cl * err.CL_scale;
    f.drag = f.qs * cd * err.CD_scale;
    f.thrust = u.eta * aero.T_max * err.thrust_scale;
    f.axial = -f.drag + f.thrust * std::cos(u.alpha);
    f.normal = f.lift + f.thrust * std::sin(u.alpha);
    return f;
}

} // namespace

Vector AircraftState::to_vector() const {
    Vector v(6);
    v << x, y, h, V, chi, gamma;
    return v;
}

AircraftState AircraftState::from_vector(const Vector& s) {
    if (s.size() != 6) {
        throw Error(ErrorKind::Shape, "aircraft state must have 6 entries");
    }
    return {s(0), s(1), s(2), s(3), s(4), s(5)};
}

Vector AircraftControls::to_vector() const {
    Vector v(3);
    v << alpha, mu, eta;
    return v;
}

AircraftControls AircraftControls::from_vector(const Vector& u) {
    if (u.size() != 3) {
        throw Error(ErrorKind::Shape, "aircraft controls must have 3 entries");
    }
    return {u(0), u(1), u(2)};
}

void AeroModel::validate() const {
    const bool ok = mass > 0 && S > 0 && T_max > 0 && g > 0 && rho > 0 && CL0 >= 0 && CL_alpha > 0 && CD0 > 0 &&
                    k_induced > 0;
    if (!ok) {
        throw Error(ErrorKind::Configuration, "aero constants must be positive (CL0 may be zero)");
    }
}

void ErrorInjection::validate() const {
    for (double scale : {thrust_scale, CL_scale, CD_scale}) {
        if (!(scale > 0.5 && scale < 1.5)) {
            throw Error(ErrorKind::Configuration, "error-injection scales must lie in (0.5, 1.5)");
        }
    }
    if (!std::isfinite(side_force_bias)) {
        throw Error(ErrorKind::Configuration, "side_force_bias must be finite");
    }
}

bool ErrorInjection::is_nominal() const noexcept {
    return thrust_scale == 1.0 && CL_scale == 1.0 && CD_scale == 1.0 && side_force_bias == 0.0;
}

Forces forces(const AircraftState& s, const AircraftControls& u, const AeroModel& aero, const ErrorInjection& err) {
    const auto f = force_terms(s, u, aero, err);
    return {f.lift, f.drag, f.thrust};
}

Vector state_derivative(const AircraftState& s, const AircraftControls& u, const AeroModel& aero,
                        const ErrorInjection& err) {
    check_state(s);
    const auto f = force_terms(s, u, aero, err);
    const double m = aero.mass;
    const double cg = std::cos(s.gamma), sg = std::sin(s.gamma);
    const double cm = std::cos(u.mu), sm = std::sin(u.mu);
    const double y_force = err.side_force_bias;

    Vector d(6);
    d(0) = s.V * cg * std::cos(s.chi);
    d(1) = s.V * cg * std::sin(s.chi);
    d(2) = s.V * sg;
    d(3) = (f.axial - m * aero.g * sg) / m;
    d(4) = (f.normal * sm + y_force * cm) / (m * s.V * cg);
    d(5) = (f.normal * cm - y_force * sm - m * aero.g * cg) / (m * s.V);
    return d;
}

Vector v_aircraft(const AircraftState& s, const AircraftControls& u, const AeroModel& aero, const ErrorInjection& err) {
    check_state(s);
    const auto f = force_terms(s, u, aero, err);
    const auto ax = axes(s.chi, s.gamma, u.mu);
    Eigen::Vector3d a = (f.axial * ax.t + f.normal * ax.n + err.side_force_bias * ax.s) / aero.mass;
    a(2) -= aero.g;
    return a;
}

Matrix jac_v_controls(const AircraftState& s, const AircraftControls& u, const AeroModel& aero,
                      const ErrorInjection& err) {
    check_state(s);
    const auto f = force_terms(s, u, aero, err);
    const auto ax = axes(s.chi, s.gamma, u.mu);
    const double ca = std::cos(u.alpha), sa = std::sin(u.alpha);
    const double t_avail = aero.T_max * err.thrust_scale;

    const double dlift = f.qs * aero.CL_alpha * err.CL_scale;
    const double ddrag = 2.0 * f.qs * aero.k_induced * f.cl * aero.CL_alpha * err.CD_scale;
    const double daxial_dalpha = -ddrag - f.thrust * sa;
    const double dnormal_dalpha = dlift + f.thrust * ca;

    Matrix j(3, 3);
    j.col(0) = (daxial_dalpha * ax.t + dnormal_dalpha * ax.n) / aero.mass;
    // d n / d mu = s, d s / d mu = -n
    j.col(1) = (f.normal * ax.s - err.side_force_bias * ax.n) / aero.mass;
    j.col(2) = (t_avail * ca * ax.t + t_avail * sa * ax.n) / aero.mass;
    return j;
}

Matrix jac_v_state(const AircraftState& s, const AircraftControls& u, const AeroModel& aero, const ErrorInjection& err) {
    check_state(s);
    const auto f = force_terms(s, u, aero, err);
    const auto ax = axes(s.chi, s.gamma, u.mu);
    const double cc = std::cos(s.chi), sc = std::sin(s.chi);
    const double cg = std::cos(s.gamma), sg = std::sin(s.gamma);
    const double cm = std::cos(u.mu), sm = std::sin(u.mu);
    const double y_force = err.side_force_bias;
    const double m = aero.mass;

    Matrix j = Matrix::Zero(3, 6);
    // Lift and drag scale with V^2; thrust does not.
    j.col(3) = (-2.0 * f.drag / s.V * ax.t + 2.0 * f.lift / s.V * ax.n) / m;

    Eigen::Vector3d t_chi(-cg * sc, cg * cc, 0.0);
    Eigen::Vector3d n_chi(sg * sc * cm - cc * sm, -sg * cc * cm - sc * sm, 0.0);
    Eigen::Vector3d s_chi(-sg * sc * sm - cc * cm, sg * cc * sm - sc * cm, 0.0);
    j.col(4) = (f.axial * t_chi + f.normal * n_chi + y_force * s_chi) / m;

    Eigen::Vector3d t_gam(-sg * cc, -sg * sc, cg);
    Eigen::Vector3d n_gam(-cg * cc * cm, -cg * sc * cm, -sg * cm);
    Eigen::Vector3d s_gam(cg * cc * sm, cg * sc * sm, sg * sm);
    j.col(5) = (f.axial * t_gam + f.normal * n_gam + y_force * s_gam) / m;
    return j;
}

Vector position_stack(const AircraftState& s) {
    const double cg = std::cos(s.gamma);
    Vector st(6);
    st << s.x, s.V * cg * std::cos(s.chi), s.y, s.V * cg * std::sin(s.chi), s.h, s.V * std::sin(s.gamma);
    return st;
}

Vector ActuatorBank::values() const {
    Vector v(static_cast<Eigen::Index>(channels.size()));
    for (std::size_t i = 0; i < channels.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = channels[i].value;
    }
    return v;
}

ActuatorBank default_actuators(const AircraftControls& initial) {
    ActuatorBank bank;
    bank.channels = {
        {initial.alpha, 0.1, std::nullopt, -5.0 * kDeg, 20.0 * kDeg},
        {initial.mu, 0.1, std::nullopt, -60.0 * kDeg, 60.0 * kDeg},
        {initial.eta, 0.5, std::nullopt, 0.0, 1.0},
    };
    return bank;
}

ActuatorBank actuator_step(const ActuatorBank& bank, const Vector& commands, double dt) {
    if (!(dt > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "actuator_step requires dt > 0");
    }
    if (commands.size() != static_cast<Eigen::Index>(bank.channels.size())) {
        throw Error(ErrorKind::Shape, "actuator_step: one command per channel required");
    }
    ActuatorBank out = bank;
    for (std::size_t i = 0; i < out.channels.size(); ++i) {
        auto& ch = out.channels[i];
        if (!(ch.tau > 0.0)) {
            throw Error(ErrorKind::Configuration, "actuator time constant must be positive");
        }
        const double cmd = commands(static_cast<Eigen::Index>(i));
        double next = cmd + (ch.value - cmd) * std::exp(-dt / ch.tau);
        if (ch.rate_limit) {
            const double max_delta = *ch.rate_limit * dt;
            next = std::clamp(next, ch.value - max_delta, ch.value + max_delta);
        }
        if (ch.lower) next = std::max(next, *ch.lower);
        if (ch.upper) next = std::min(next, *ch.upper);
        ch.value = next;
    }
    return out;
}

ActuatorBank actuator_step(const ActuatorBank& bank, const AircraftControls& commands, double dt) {
    return actuator_step(bank, commands.to_vector(), dt);
}

Trim trim_level_flight(double V, double h, const AeroModel& aero, const ErrorInjection& err) {
    aero.validate();
    if (!(V > 0.0) || !std::isfinite(h)) {
        throw Error(ErrorKind::Trim, "trim requires V > 0 and finite altitude");
    }
    const AircraftState s{0.0, 0.0, h, V, 0.0, 0.0};
    auto residual = [&](double alpha, double eta) {
        const auto f = force_terms(s, {alpha, 0.0, eta}, aero, err);
        Eigen::Vector2d r(f.axial / aero.mass, (f.normal - aero.mass * aero.g) / aero.mass);
        return r;
    };

    Eigen::Vector2d p(5.0 * kDeg, 0.2);
    Eigen::Vector2d r = residual(p(0), p(1));
    for (int iter = 0; iter < 100 && r.norm() >= 1e-10; ++iter) {
        Eigen::Matrix2d j;
        constexpr double step = 1e-7;
        for (int c = 0; c < 2; ++c) {
            Eigen::Vector2d dp = Eigen::Vector2d::Zero();
            dp(c) = step;
            j.col(c) = (residual(p(0) + dp(0), p(1) + dp(1)) - residual(p(0) - dp(0), p(1) - dp(1))) / (2 * step);
        }
        const Eigen::Vector2d delta = j.fullPivLu().solve(-r);
        double lambda = 1.0;
        Eigen::Vector2d trial = p + delta;
        Eigen::Vector2d rt = residual(trial(0), trial(1));
        while (rt.norm() >= r.norm() && lambda > 1e-6) {
            lambda *= 0.5;
            trial = p + lambda * delta;
            rt = residual(trial(0), trial(1));
        }
        p = trial;
        r = rt;
    }
    if (!(r.norm() < 1e-9) || !(p(0) > -5.0 * kDeg && p(0) < 20.0 * kDeg) || !(p(1) > 0.0 && p(1) < 1.0)) {
        std::ostringstream msg;
        msg << "no level-flight trim at V = " << V << " m/s within alpha in (-5, 20) deg, eta in (0, 1)"
            << " (reached alpha = " << p(0) / kDeg << " deg, eta = " << p(1) << ", residual " << r.norm() << ")";
        throw Error(ErrorKind::Trim, msg.str());
    }
    return {p(0), p(1)};
}

plant::ModelPtr make_aircraft_model(const AeroModel& aero, const ErrorInjection& err) {
    aero.validate();
    err.validate();
    plant::SystemModel::Definition def;
    def.name = "aircraft-3dof";
    def.n = 6;
    def.m = 3;
    def.alphas = {2, 2, 2};
    def.dynamics = [aero, err](const Vector& x, const Vector& u) {
        return state_derivative(AircraftState::from_vector(x), AircraftControls::from_vector(u), aero, err);
    };
    def.output = [](const Vector& x) { return Vector(x.head(3)); };
    def.v_map = [aero, err](const Vector& x, const Vector& u) {
        return v_aircraft(AircraftState::from_vector(x), AircraftControls::from_vector(u), aero, err);
    };
    def.derivative_stack = [](const Vector& x, const Vector&) {
        return position_stack(AircraftState::from_vector(x));
    };
    def.analytic_jacobians = [aero, err](const Vector& x, const Vector& u) {
        const auto s = AircraftState::from_vector(x);
        const auto c = AircraftControls::from_vector(u);
        return plant::JacobianPair{jac_v_controls(s, c, aero, err), jac_v_state(s, c, aero, err)};
    };
    return std::make_shared<const plant::SystemModel>(std::move(def));
}

} // namespace nafl::aircraft
