#include "nafl/numerics.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "nafl/error.hpp"

namespace nafl::numerics {

bool all_finite(const Matrix& m) noexcept {
    return m.allFinite();
}

Matrix pseudo_inverse(const Matrix& m, double rel_tol) {
    if (m.size() == 0) {
        throw Error(ErrorKind::Shape, "pseudo_inverse of an empty matrix");
    }
    if (!all_finite(m)) {
        throw Error(ErrorKind::InvalidInput, "pseudo_inverse input has non-finite entries");
    }
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sigma = svd.singularValues();
    const double cutoff = rel_tol * (sigma.size() > 0 ? sigma(0) : 0.0);

    Vector inv_sigma = Vector::Zero(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > cutoff && sigma(i) > 0.0) {
            inv_sigma(i) = 1.0 / sigma(i);
        }
    }
    return svd.matrixV() * inv_sigma.asDiagonal() * svd.matrixU().transpose();
}

Matrix solve_lyapunov(const Matrix& a_c) {
    if (a_c.rows() != a_c.cols() || a_c.rows() == 0) {
        throw Error(ErrorKind::Shape, "solve_lyapunov needs a non-empty square matrix");
    }
    if (!all_finite(a_c)) {
        throw Error(ErrorKind::InvalidInput, "solve_lyapunov input has non-finite entries");
    }
    const Eigen::Index n = a_c.rows();

    Eigen::EigenSolver<Matrix> es(a_c, false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto lambda = es.eigenvalues()(i);
        if (!(lambda.real() < 0.0)) {
            std::ostringstream msg;
            msg << "matrix is not Hurwitz: eigenvalue " << lambda.real()
                << (lambda.imag() < 0 ? " - " : " + ") << std::abs(lambda.imag()) << "i has non-negative real part";
            throw Error(ErrorKind::Stability, msg.str());
        }
    }

    // Column-major vec: vec(A^T P + P A) = (I kron A^T + A^T kron I) vec(P).
    const Matrix at = a_c.transpose();
    const Matrix eye = Matrix::Identity(n, n);
    Matrix op = Matrix::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            op.block(i * n, j * n, n, n) += eye(i, j) * at;
            op.block(i * n, j * n, n, n) += at(i, j) * eye;
        }
    }
    Vector rhs = Eigen::Map<const Vector>((-2.0 * eye).eval().data(), n * n);
    Vector p_vec = op.fullPivLu().solve(rhs);
    Matrix p = Eigen::Map<Matrix>(p_vec.data(), n, n);
    return 0.5 * (p + p.transpose());
}

EigExtrema eig_extrema_sym(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw Error(ErrorKind::Shape, "eig_extrema_sym needs a non-empty square matrix");
    }
    if (!all_finite(m)) {
        throw Error(ErrorKind::InvalidInput, "eig_extrema_sym input has non-finite entries");
    }
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    return {ev.minCoeff(), ev.maxCoeff()};
}

namespace {

Vector checked(const Derivative& deriv, double t, const Vector& s) {
    Vector d = deriv(t, s);
    if (d.size() != s.size()) {
        throw Error(ErrorKind::Shape, "derivative dimension does not match state dimension");
    }
    if (!d.allFinite()) {
        std::ostringstream msg;
        msg << "non-finite state derivative at t = " << t;
        throw Error(ErrorKind::Divergence, msg.str(), t);
    }
    return d;
}

} // namespace

Vector rk4_step(const Derivative& deriv, const Vector& s, double t, double dt) {
    if (!(dt > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "rk4_step requires dt > 0");
    }
    const double half = 0.5 * dt;
    const Vector k1 = checked(deriv, t, s);
    const Vector k2 = checked(deriv, t + half, s + half * k1);
    const Vector k3 = checked(deriv, t + half, s + half * k2);
    const Vector k4 = checked(deriv, t + dt, s + dt * k3);
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Matrix finite_diff_jacobian(const VectorFunction& fn, const Vector& at, double h) {
    if (!(h > 0.0)) {
        throw Error(ErrorKind::InvalidInput, "finite_diff_jacobian requires h > 0");
    }
    const Vector f0 = fn(at);
    if (!f0.allFinite()) {
        throw Error(ErrorKind::Evaluation, "function is non-finite at the expansion point");
    }
    Matrix jac(f0.size(), at.size());
    Vector probe = at;
    for (Eigen::Index j = 0; j < at.size(); ++j) {
        const double step = h * std::max(1.0, std::abs(at(j)));
        probe(j) = at(j) + step;
        const Vector fp = fn(probe);
        probe(j) = at(j) - step;
        const Vector fm = fn(probe);
        probe(j) = at(j);
        if (!fp.allFinite() || !fm.allFinite() || fp.size() != f0.size() || fm.size() != f0.size()) {
            throw Error(ErrorKind::Evaluation, "function is non-finite at a finite-difference probe");
        }
        jac.col(j) = (fp - fm) / (2.0 * step);
    }
    return jac;
}

} // namespace nafl::numerics
