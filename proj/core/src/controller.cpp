#include "nafl/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nafl/error.hpp"

namespace nafl::control {

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
        case Mode::Full: return "full";
        case Mode::InverseFree: return "inverse-free";
        case Mode::PureInverse: return "pure-inverse";
    }
    return "full";
}

Mode parse_mode(std::string_view text) {
    if (text == "full") return Mode::Full;
    if (text == "inverse-free") return Mode::InverseFree;
    if (text == "pure-inverse") return Mode::PureInverse;
    throw Error(ErrorKind::Configuration, "unknown controller mode '" + std::string(text) + "'");
}

namespace {

int total_order(std::span<const int> alphas) {
    return std::accumulate(alphas.begin(), alphas.end(), 0);
}

void check_alphas(std::span<const int> alphas) {
    if (alphas.empty()) {
        throw Error(ErrorKind::Configuration, "relative degrees must be non-empty");
    }
    for (int a : alphas) {
        if (a < 1) {
            throw Error(ErrorKind::Configuration, "relative degrees must be >= 1");
        }
    }
}

void check_gain_shapes(std::span<const int> alphas, const GainSet& gains) {
    const auto m = alphas.size();
    if (gains.k_blocks.size() != m || gains.k_integral.size() != m) {
        throw Error(ErrorKind::Shape, "gain set does not match the number of outputs");
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (static_cast<int>(gains.k_blocks[i].size()) != alphas[i]) {
            throw Error(ErrorKind::Shape, "gain block " + std::to_string(i) + " must have alpha_i entries");
        }
    }
    if (gains.k_s.rows() != static_cast<Eigen::Index>(m) || gains.k_s.cols() != static_cast<Eigen::Index>(m)) {
        throw Error(ErrorKind::Shape, "K_s must be m x m");
    }
}

} // namespace

ErrorDynamics build_error_dynamics(std::span<const int> alphas) {
    check_alphas(alphas);
    const int n = total_order(alphas);
    const auto m = static_cast<Eigen::Index>(alphas.size());
    ErrorDynamics out{Matrix::Zero(n, n), Matrix::Zero(n, m)};
    int off = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const int a = alphas[static_cast<std::size_t>(i)];
        for (int k = 0; k + 1 < a; ++k) {
            out.a(off + k, off + k + 1) = 1.0;
        }
        out.b(off + a - 1, i) = 1.0;
        off += a;
    }
    return out;
}

std::vector<double> pole_gains(std::span<const std::complex<double>> poles) {
    if (poles.empty()) {
        throw Error(ErrorKind::Configuration, "pole set is empty");
    }
    constexpr double kPairTol = 1e-9;
    std::vector<bool> used(poles.size(), false);
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const auto p = poles[i];
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
            throw Error(ErrorKind::Configuration, "pole is not finite");
        }
        if (!(p.real() < 0.0)) {
            std::ostringstream msg;
            msg << "pole " << p.real() << (p.imag() < 0 ? "-" : "+") << std::abs(p.imag())
                << "i is not in the open left half-plane";
            throw Error(ErrorKind::Configuration, msg.str());
        }
        if (std::abs(p.imag()) <= kPairTol || used[i]) {
            continue;
        }
        bool paired = false;
        for (std::size_t j = i + 1; j < poles.size(); ++j) {
            if (!used[j] && std::abs(poles[j] - std::conj(p)) <= kPairTol * std::max(1.0, std::abs(p))) {
                used[i] = used[j] = true;
                paired = true;
                break;
            }
        }
        if (!paired) {
            std::ostringstream msg;
            msg << "complex pole " << p.real() << (p.imag() < 0 ? "-" : "+") << std::abs(p.imag())
                << "i has no conjugate partner";
            throw Error(ErrorKind::Configuration, msg.str());
        }
    }

    // Expand prod (s - p_j); coeffs[k] multiplies s^k.
    std::vector<std::complex<double>> coeffs{1.0};
    for (const auto& p : poles) {
        std::vector<std::complex<double>> next(coeffs.size() + 1, 0.0);
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            next[k + 1] += coeffs[k];
            next[k] -= p * coeffs[k];
        }
        coeffs = std::move(next);
    }
    std::vector<double> k(poles.size());
    for (std::size_t j = 0; j < poles.size(); ++j) {
        k[j] = coeffs[j].real();
    }
    return k;
}

Matrix feedback_matrix(std::span<const int> alphas, const GainSet& gains) {
    check_alphas(alphas);
    check_gain_shapes(alphas, gains);
    const auto m = static_cast<Eigen::Index>(alphas.size());
    Matrix k = Matrix::Zero(m, total_order(alphas));
    int off = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& block = gains.k_blocks[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < block.size(); ++j) {
            k(i, off + static_cast<int>(j)) = -block[j];
        }
        off += alphas[static_cast<std::size_t>(i)];
    }
    return k;
}

Matrix closed_loop_matrix(std::span<const int> alphas, const GainSet& gains) {
    const auto ed = build_error_dynamics(alphas);
    return ed.a + ed.b * feedback_matrix(alphas, gains);
}

GainSet make_gain_set(std::span<const int> alphas, std::vector<std::vector<double>> k_blocks, Matrix k_s,
                      std::vector<double> k_integral) {
    check_alphas(alphas);
    GainSet gains{std::move(k_blocks), std::move(k_s), std::move(k_integral)};
    check_gain_shapes(alphas, gains);

    if (!gains.k_s.allFinite() || (gains.k_s - gains.k_s.transpose()).cwiseAbs().maxCoeff() >
                                      1e-12 * std::max(1.0, gains.k_s.cwiseAbs().maxCoeff())) {
        throw Error(ErrorKind::Configuration, "K_s must be finite and symmetric");
    }
    if (!(numerics::eig_extrema_sym(gains.k_s).min > 0.0)) {
        throw Error(ErrorKind::Configuration, "K_s must be positive-definite");
    }
    for (double k0 : gains.k_integral) {
        if (!(k0 >= 0.0) || !std::isfinite(k0)) {
            throw Error(ErrorKind::Configuration, "integral gains must be finite and >= 0");
        }
    }
    const Matrix a_c = closed_loop_matrix(alphas, gains);
    Eigen::EigenSolver<Matrix> es(a_c, false);
    for (Eigen::Index i = 0; i < a_c.rows(); ++i) {
        if (!(es.eigenvalues()(i).real() < 0.0)) {
            throw Error(ErrorKind::Configuration, "gain blocks do not give a Hurwitz closed loop");
        }
    }
    return gains;
}

Vector prescribed_z(std::span<const int> alphas, const Vector& e_stack, const ReferenceStack& ref,
                    const Vector& integral_err, const GainSet& gains) {
    check_gain_shapes(alphas, gains);
    const auto m = static_cast<Eigen::Index>(alphas.size());
    if (e_stack.size() != total_order(alphas) || integral_err.size() != m) {
        throw Error(ErrorKind::Shape, "prescribed_z: inconsistent error or integral dimensions");
    }
    Vector z(m);
    int off = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const int a = alphas[ui];
        double zi = -gains.k_integral[ui] * integral_err(i);
        for (int j = 0; j < a; ++j) {
            zi -= gains.k_blocks[ui][static_cast<std::size_t>(j)] * e_stack(off + j);
        }
        zi += ref.derivative(static_cast<int>(i), a);
        z(i) = zi;
        off += a;
    }
    return z;
}

Vector zdot(std::span<const int> alphas, const Vector& e_stack_dot, const ReferenceStack& ref,
            const Vector& y_minus_yr, const GainSet& gains) {
    check_gain_shapes(alphas, gains);
    const auto m = static_cast<Eigen::Index>(alphas.size());
    if (e_stack_dot.size() != total_order(alphas) || y_minus_yr.size() != m) {
        throw Error(ErrorKind::Shape, "zdot: inconsistent error-rate or output dimensions");
    }
    Vector zd(m);
    int off = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const int a = alphas[ui];
        double v = -gains.k_integral[ui] * y_minus_yr(i);
        for (int j = 0; j < a; ++j) {
            v -= gains.k_blocks[ui][static_cast<std::size_t>(j)] * e_stack_dot(off + j);
        }
        v += ref.derivative(static_cast<int>(i), a + 1);
        zd(i) = v;
        off += a;
    }
    return zd;
}

Residual residual(const plant::SystemModel& model, const Vector& x, const Vector& u, const Vector& z) {
    Residual r;
    r.h = plant::eval_v(model, x, u) - z;
    r.v_s = 0.5 * r.h.squaredNorm();
    return r;
}

ControlRate control_derivative(const plant::JacobianPair& jac, const Vector& h, const Vector& xdot,
                               const Vector& z_dot, const GainSet& gains, Mode mode) {
    const Matrix& j_u = jac.dv_du;
    if (!j_u.allFinite() || !jac.dv_dx.allFinite()) {
        throw Error(ErrorKind::Evaluation, "control_derivative: non-finite Jacobian");
    }
    if (j_u.rows() != j_u.cols() || j_u.rows() != h.size() || jac.dv_dx.cols() != xdot.size() ||
        z_dot.size() != h.size() || gains.k_s.rows() != h.size()) {
        throw Error(ErrorKind::Shape, "control_derivative: inconsistent dimensions");
    }

    ControlRate out;
    out.u_dot = Vector::Zero(h.size());
    out.det_dv_du = j_u.determinant();

    if (mode != Mode::PureInverse) {
        out.u_dot -= gains.k_s * (j_u.transpose() * h);
    }
    if (mode != Mode::InverseFree) {
        const Vector drift = jac.dv_dx * xdot - z_dot;
        Eigen::JacobiSVD<Matrix> svd(j_u);
        const double sigma_max = svd.singularValues()(0);
        const double scale = std::pow(sigma_max, static_cast<double>(j_u.rows()));
        if (std::abs(out.det_dv_du) < kSingularDetTolerance * scale || sigma_max == 0.0) {
            out.pseudo_inverse_active = true;
            out.u_dot -= numerics::pseudo_inverse(j_u) * drift;
        } else {
            out.u_dot -= j_u.partialPivLu().solve(drift);
        }
    }
    return out;
}

ControlRate control_derivative(const plant::SystemModel& model, const Vector& x, const Vector& xdot, const Vector& u,
                               const Vector& z, const Vector& z_dot, const GainSet& gains, Mode mode) {
    const auto jac = plant::jacobians(model, x, u);
    const Vector h = plant::eval_v(model, x, u) - z;
    return control_derivative(jac, h, xdot, z_dot, gains, mode);
}

double min_gain_bound(const Matrix& dv_du, const Matrix& m_matrix) {
    if (dv_du.rows() != dv_du.cols() || m_matrix.rows() != dv_du.rows() || m_matrix.cols() != dv_du.cols()) {
        throw Error(ErrorKind::Shape, "min_gain_bound: dv_du and M must be square and the same size");
    }
    const Matrix jjt = dv_du * dv_du.transpose();
    const double lam_min = numerics::eig_extrema_sym(jjt).min;
    const double sigma_max_sq = numerics::eig_extrema_sym(jjt).max;
    if (!(lam_min > numerics::kPinvTolerance * numerics::kPinvTolerance * sigma_max_sq) || !(lam_min > 0.0)) {
        throw Error(ErrorKind::Rank, "min_gain_bound: dv/du is rank deficient");
    }
    const double lam_m = numerics::eig_extrema_sym(m_matrix + m_matrix.transpose()).max;
    return lam_m / (2.0 * lam_min);
}

bool apply_limits(ControllerState& state, const ControllerLimits& limits) {
    bool clamped = false;
    if (limits.lower || limits.upper) {
        for (Eigen::Index i = 0; i < state.u.size(); ++i) {
            double v = state.u(i);
            if (limits.lower) v = std::max(v, (*limits.lower)(i));
            if (limits.upper) v = std::min(v, (*limits.upper)(i));
            clamped = clamped || v != state.u(i);
            state.u(i) = v;
        }
    }
    for (Eigen::Index i = 0; i < state.integral_err.size(); ++i) {
        const double v = std::clamp(state.integral_err(i), -limits.anti_windup, limits.anti_windup);
        clamped = clamped || v != state.integral_err(i);
        state.integral_err(i) = v;
    }
    return clamped;
}

ControllerState step(const ControllerState& controller, const plant::PlantInstance& plant, const ReferenceStack& ref,
                     const GainSet& gains, double dt, const Vector& xdot, const ControllerLimits& limits) {
    if (!plant.model) {
        throw Error(ErrorKind::Configuration, "step: plant instance has no model");
    }
    const auto& model = *plant.model;
    const auto m = static_cast<Eigen::Index>(model.control_dim());
    if (controller.u.size() != m || controller.integral_err.size() != m || xdot.size() != model.state_dim()) {
        throw Error(ErrorKind::Shape, "step: controller or plant-rate dimensions do not match the model");
    }
    const auto alphas = model.alphas();
    const Vector& x = plant.state;
    const Vector e = plant::error_coordinates(model, x, controller.u, ref);
    Vector y_minus_yr(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        y_minus_yr(i) = e(model.block_offset(static_cast<int>(i)));
    }
    // A held plant with zero rate has a held error stack as well.
    const bool frozen = xdot.isZero(0.0);
    const Vector e_rate = frozen ? Vector::Zero(e.size()).eval()
                                 : plant::error_coordinate_rates(model, x, controller.u, ref);
    const Vector z_dot = zdot(alphas, e_rate, ref, y_minus_yr, gains);

    auto deriv = [&](double, const Vector& s) {
        const Vector u = s.head(m);
        const Vector integral = s.tail(m);
        const Vector z = prescribed_z(alphas, e, ref, integral, gains);
        const auto rate = control_derivative(model, x, xdot, u, z, z_dot, gains, controller.mode);
        Vector d(2 * m);
        d << rate.u_dot, y_minus_yr;
        return d;
    };

    Vector s(2 * m);
    s << controller.u, controller.integral_err;
    Vector next;
    try {
        next = numerics::rk4_step(deriv, s, plant.time, dt);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Evaluation) {
            throw;
        }
        throw Error(ErrorKind::Divergence, e.what(), plant.time + dt);
    }

    ControllerState out{next.head(m), next.tail(m), controller.mode};
    apply_limits(out, limits);
    if (!out.u.allFinite() || out.u.norm() > limits.divergence_bound) {
        std::ostringstream msg;
        msg << "control norm exceeded " << limits.divergence_bound << " at t = " << plant.time + dt;
        throw Error(ErrorKind::Divergence, msg.str(), plant.time + dt);
    }
    return out;
}

} // namespace nafl::control
