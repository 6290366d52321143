#pragma once

#include <functional>

#include <Eigen/Dense>

namespace nafl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace numerics {

/// Relative singular-value cutoff used for rank decisions.
inline constexpr double kPinvTolerance = 1e-12;

bool all_finite(const Matrix& m) noexcept;

/**
 * Moore-Penrose pseudo-inverse via SVD. Singular values below
 * rel_tol * sigma_max are treated as zero.
 *
 * Throws ErrorKind::InvalidInput on non-finite entries.
 */
Matrix pseudo_inverse(const Matrix& m, double rel_tol = kPinvTolerance);

/**
 * Solves A^T P + P A = -2 I for symmetric positive-definite P.
 *
 * a_c must be Hurwitz; otherwise ErrorKind::Stability is thrown and the
 * message names the offending eigenvalue.
 */
Matrix solve_lyapunov(const Matrix& a_c);

struct EigExtrema {
    double min = 0.0;
    double max = 0.0;
};

/// Extreme eigenvalues of (m + m^T) / 2.
EigExtrema eig_extrema_sym(const Matrix& m);

using Derivative = std::function<Vector(double t, const Vector& s)>;

/// One classical fourth-order Runge-Kutta step. Non-finite stage derivatives
/// raise ErrorKind::Divergence carrying the stage time.
Vector rk4_step(const Derivative& deriv, const Vector& s, double t, double dt);

using VectorFunction = std::function<Vector(const Vector&)>;

/// Central-difference Jacobian; coordinate j is perturbed by h * max(1, |at_j|).
Matrix finite_diff_jacobian(const VectorFunction& fn, const Vector& at, double h = 1e-6);

} // namespace numerics
} // namespace nafl
