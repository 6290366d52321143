#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nafl/numerics.hpp"
#include "nafl/plant.hpp"
#include "nafl/reference.hpp"

namespace nafl::control {

/**
 * Which terms of the control-rate law are active.
 *
 *   full          u' = -Ks J^T (v - z) - J^-1 (dv/dx x' - z')
 *   inverse-free  u' = -Ks J^T (v - z)
 *   pure-inverse  u' =              - J^-1 (dv/dx x' - z')
 *
 * with J = dv/du. The descent term drives the residual h = v - z to zero;
 * the inverse term cancels the drift of v and z along the trajectory.
 */
enum class Mode { Full, InverseFree, PureInverse };

std::string_view to_string(Mode mode) noexcept;
/// Accepts "full", "inverse-free", "pure-inverse"; throws ErrorKind::Configuration otherwise.
Mode parse_mode(std::string_view text);

/**
 * Controller gains.
 *
 * k_blocks[i] = (k_1, ..., k_alpha_i) for output i, so the error block obeys
 * e^(alpha) + k_alpha e^(alpha-1) + ... + k_1 e = 0. All k's are positive for
 * a Hurwitz loop. k_s is the symmetric positive-definite descent gain;
 * k_integral[i] >= 0 weights the accumulated output error.
 */
struct GainSet {
    std::vector<std::vector<double>> k_blocks;
    Matrix k_s;
    std::vector<double> k_integral;
};

/// Validates shapes, K_s positive-definiteness, k_integral >= 0 and that
/// A + B K is Hurwitz. Throws ErrorKind::Configuration.
GainSet make_gain_set(std::span<const int> alphas, std::vector<std::vector<double>> k_blocks, Matrix k_s,
                      std::vector<double> k_integral);

struct ControllerState {
    Vector u;
    Vector integral_err;
    Mode mode = Mode::Full;
};

struct ControllerLimits {
    std::optional<Vector> lower; ///< per-channel control saturation, applied after integration
    std::optional<Vector> upper;
    double anti_windup = 100.0;  ///< |integral_err_i| bound, output units * s
    double divergence_bound = 1e6;
};

struct ErrorDynamics {
    Matrix a;
    Matrix b;
};

/// Block-diagonal chain-of-integrators pair (A, B) for the error stack.
ErrorDynamics build_error_dynamics(std::span<const int> alphas);

/// Gains (k_1 .. k_alpha) whose companion block has exactly the given poles.
std::vector<double> pole_gains(std::span<const std::complex<double>> poles);

/// Feedback matrix K (m x sum(alpha)) with A_c = A + B K; rows are -k_i.
Matrix feedback_matrix(std::span<const int> alphas, const GainSet& gains);

/// Closed-loop error matrix A + B K.
Matrix closed_loop_matrix(std::span<const int> alphas, const GainSet& gains);

/**
 * Prescribed output dynamics
 *
 *   z_i = -k0_i * I_i - sum_j k_j e_i^(j-1) + y_ri^(alpha_i).
 */
Vector prescribed_z(std::span<const int> alphas, const Vector& e_stack, const ReferenceStack& ref,
                    const Vector& integral_err, const GainSet& gains);

/**
 * Time derivative of prescribed_z:
 *
 *   z'_i = -k0_i (y_i - y_ri) - sum_j k_j e'_i^(j-1) + y_ri^(alpha_i + 1).
 */
Vector zdot(std::span<const int> alphas, const Vector& e_stack_dot, const ReferenceStack& ref,
            const Vector& y_minus_yr, const GainSet& gains);

struct Residual {
    Vector h;
    double v_s = 0.0; ///< 0.5 |h|^2
};

Residual residual(const plant::SystemModel& model, const Vector& x, const Vector& u, const Vector& z);

/// Relative determinant threshold below which J^-1 is replaced by J^+.
inline constexpr double kSingularDetTolerance = 1e-10;

struct ControlRate {
    Vector u_dot;
    double det_dv_du = 0.0;
    bool pseudo_inverse_active = false;
};

ControlRate control_derivative(const plant::SystemModel& model, const Vector& x, const Vector& xdot, const Vector& u,
                               const Vector& z, const Vector& z_dot, const GainSet& gains, Mode mode);

/// Same as above with a precomputed Jacobian pair at (x, u).
ControlRate control_derivative(const plant::JacobianPair& jac, const Vector& h, const Vector& xdot,
                               const Vector& z_dot, const GainSet& gains, Mode mode);

/**
 * Smallest scalar k_s for which K_s = k_s I satisfies the inverse-free gain
 * condition at the current point:
 *
 *   max eig(M + M^T) / (2 min eig(J J^T)).
 *
 * Throws ErrorKind::Rank when dv_du is singular.
 */
double min_gain_bound(const Matrix& dv_du, const Matrix& m_matrix);

/// Clamps the stored control and integral state; returns true if any clamp was active.
bool apply_limits(ControllerState& state, const ControllerLimits& limits);

/**
 * Advances the controller by dt with the plant held at its current state
 * (sample-and-hold use). `xdot` is the plant rate measured at the start of the
 * step and held across it; pass zero for a frozen plant. The reference stack
 * is held as well. Integration is RK4 on (u, integral_err), followed by
 * saturation and anti-windup clamping.
 *
 * Throws ErrorKind::Divergence (with time) if |u| exceeds the divergence bound.
 */
ControllerState step(const ControllerState& controller, const plant::PlantInstance& plant, const ReferenceStack& ref,
                     const GainSet& gains, double dt, const Vector& xdot, const ControllerLimits& limits = {});

} // namespace nafl::control
