#include <algorithm>
#include <complex>

#include <gtest/gtest.h>

#include "nafl/controller.hpp"
#include "nafl/error.hpp"
#include "nafl/numerics.hpp"
#include "nafl/plant.hpp"
#include "support/gen.hpp"
#include "support/descent.hpp"
#include "support/oracles.hpp"

using namespace nafl;
using cd = std::complex<double>;

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

std::vector<double> sorted_real(const Eigen::VectorXcd& ev) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < ev.size(); ++i) out.push_back(ev(i).real());
    std::sort(out.begin(), out.end());
    return out;
}

control::GainSet scalar_gains(double k1, double k_s, double k0 = 0.0) {
    const std::vector<int> alphas{1};
    return control::make_gain_set(alphas, {{k1}}, Matrix::Constant(1, 1, k_s), {k0});
}

} // namespace

TEST(Mode, ParseRoundTrip) {
    for (auto mode : {control::Mode::Full, control::Mode::InverseFree, control::Mode::PureInverse}) {
        EXPECT_EQ(control::parse_mode(control::to_string(mode)), mode);
    }
    EXPECT_THROW(control::parse_mode("fast"), Error);
}

TEST(PoleGains, KnownPolynomials) {
    const std::vector<cd> p12{-1.0, -2.0};
    EXPECT_EQ(control::pole_gains(p12), (std::vector<double>{2.0, 3.0}));
    const std::vector<cd> pc{{-2.0, 2.0}, {-2.0, -2.0}};
    const auto k = control::pole_gains(pc);
    EXPECT_NEAR(k[0], 8.0, 1e-14);
    EXPECT_NEAR(k[1], 4.0, 1e-14);
}

TEST(PoleGains, RejectsUnpairedAndUnstablePoles) {
    const std::vector<cd> unpaired{{-1.0, 1.0}, {-1.0, 0.5}};
    EXPECT_THROW(control::pole_gains(unpaired), Error);
    const std::vector<cd> unstable{0.5, -1.0};
    EXPECT_THROW(control::pole_gains(unstable), Error);
}

TEST(PoleGainsProperty, CompanionEigenvaluesMatchRequest) {
    nafl::testing::Gen gen(31);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<cd> poles;
        const int n = gen.integer(1, 5);
        while (static_cast<int>(poles.size()) < n) {
            if (n - static_cast<int>(poles.size()) >= 2 && gen.coin()) {
                const double re = gen.uniform(-3.0, -0.2);
                const double im = gen.uniform(0.1, 2.0);
                poles.emplace_back(re, im);
                poles.emplace_back(re, -im);
            } else {
                poles.emplace_back(gen.uniform(-3.0, -0.2), 0.0);
            }
        }
        const auto k = control::pole_gains(poles);
        const auto expected = nafl::testing::monic_coefficients(poles);
        ASSERT_EQ(k.size(), expected.size());
        for (std::size_t i = 0; i < k.size(); ++i) {
            EXPECT_NEAR(k[i], expected[i], 1e-10 * std::max(1.0, std::abs(expected[i])));
        }
        const std::vector<int> alphas{n};
        const auto gains = control::make_gain_set(alphas, {k}, Matrix::Identity(1, 1), {0.0});
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(control::closed_loop_matrix(alphas, gains).cast<cd>());
        // Every requested pole has a nearby eigenvalue.
        for (const auto& p : poles) {
            double best = 1e9;
            for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
                best = std::min(best, std::abs(es.eigenvalues()(i) - p));
            }
            EXPECT_LT(best, 1e-5);
        }
    }
}

TEST(ClosedLoop, AircraftPolesMinusOneMinusTwo) {
    const std::vector<int> alphas{2, 2, 2};
    const std::vector<cd> poles{-1.0, -2.0};
    const auto k = control::pole_gains(poles);
    const auto gains = control::make_gain_set(alphas, {k, k, k}, Matrix::Identity(3, 3), {0.0, 0.0, 0.0});
    const auto ev = sorted_real(Eigen::EigenSolver<Matrix>(control::closed_loop_matrix(alphas, gains)).eigenvalues());
    const std::vector<double> expected{-2, -2, -2, -1, -1, -1};
    for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], expected[i], 1e-9);
}

TEST(GainSet, Validation) {
    const std::vector<int> alphas{1};
    EXPECT_THROW(control::make_gain_set(alphas, {{1.0}}, Matrix::Constant(1, 1, -1.0), {0.0}), Error);
    EXPECT_THROW(control::make_gain_set(alphas, {{-1.0}}, Matrix::Identity(1, 1), {0.0}), Error);
    EXPECT_THROW(control::make_gain_set(alphas, {{1.0}}, Matrix::Identity(1, 1), {-0.5}), Error);
    EXPECT_THROW(control::make_gain_set(alphas, {{1.0, 2.0}}, Matrix::Identity(1, 1), {0.0}), Error);
    Matrix asym(2, 2);
    asym << 1, 0.5, 0, 1;
    const std::vector<int> a2{1, 1};
    EXPECT_THROW(control::make_gain_set(a2, {{1.0}, {1.0}}, asym, {0.0, 0.0}), Error);
}

TEST(PrescribedZ, SignConvention) {
    const std::vector<int> alphas{2};
    const auto gains = control::make_gain_set(alphas, {{2.0, 3.0}}, Matrix::Identity(1, 1), {0.5});
    const ReferenceStack ref({{0.0, 0.0, 0.7, 0.1}});
    Vector e(2);
    e << 1.0, -2.0;
    const Vector z = control::prescribed_z(alphas, e, ref, scalar(4.0), gains);
    EXPECT_DOUBLE_EQ(z(0), -0.5 * 4.0 - 2.0 * 1.0 - 3.0 * -2.0 + 0.7);
    Vector ed(2);
    ed << -2.0, 5.0;
    const Vector zd = control::zdot(alphas, ed, ref, scalar(1.0), gains);
    EXPECT_DOUBLE_EQ(zd(0), -0.5 * 1.0 - 2.0 * -2.0 - 3.0 * 5.0 + 0.1);
}

TEST(ControlDerivative, ModesSplitTheLaw) {
    const auto model = plant::make_benchmark_scalar();
    const auto gains = scalar_gains(2.0, 3.0);
    const Vector x = scalar(0.4), u = scalar(0.6), z = scalar(0.1), zd = scalar(-0.2);
    const Vector xd = model->dynamics(x, u);
    const double j = 1.0 + 3.0 * 0.36;
    const double h = -0.4 + 0.6 + 0.216 - 0.1;
    const double descent = -3.0 * j * h;
    const double inverse = -(-1.0 * xd(0) - -0.2) / j;
    const auto full = control::control_derivative(*model, x, xd, u, z, zd, gains, control::Mode::Full);
    const auto free = control::control_derivative(*model, x, xd, u, z, zd, gains, control::Mode::InverseFree);
    const auto pure = control::control_derivative(*model, x, xd, u, z, zd, gains, control::Mode::PureInverse);
    EXPECT_NEAR(free.u_dot(0), descent, 1e-14);
    EXPECT_NEAR(pure.u_dot(0), inverse, 1e-14);
    EXPECT_NEAR(full.u_dot(0), descent + inverse, 1e-14);
    EXPECT_NEAR(full.det_dv_du, j, 1e-14);
    EXPECT_FALSE(full.pseudo_inverse_active);
}

TEST(ControlDerivative, SingularJacobianSwitchesToPseudoInverse) {
    plant::JacobianPair jac{Matrix::Zero(2, 2), Matrix::Identity(2, 2)};
    jac.dv_du(0, 0) = 2.0;
    const auto gains = control::make_gain_set(std::vector<int>{1, 1}, {{1.0}, {1.0}}, Matrix::Identity(2, 2), {0, 0});
    const Vector h = Vector::Zero(2);
    const Vector xd = Vector::Ones(2);
    const auto rate = control::control_derivative(jac, h, xd, Vector::Zero(2), gains, control::Mode::Full);
    EXPECT_TRUE(rate.pseudo_inverse_active);
    EXPECT_DOUBLE_EQ(rate.det_dv_du, 0.0);
    EXPECT_NEAR(rate.u_dot(0), -0.5, 1e-14);
    EXPECT_NEAR(rate.u_dot(1), 0.0, 1e-14);
}

TEST(MinGainBound, ClosedForm) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 3.0;
    EXPECT_NEAR(control::min_gain_bound(Matrix::Identity(2, 2), m), 3.0, 1e-14);
    EXPECT_NEAR(control::min_gain_bound(2.0 * Matrix::Identity(2, 2), m), 0.75, 1e-14);
    try {
        control::min_gain_bound(Matrix::Zero(2, 2), m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Rank);
    }
}

TEST(ApplyLimits, ClampsControlsAndIntegral) {
    control::ControllerState s{Vector::Constant(2, 5.0), Vector::Constant(2, -300.0), control::Mode::Full};
    control::ControllerLimits lim;
    lim.upper = Vector::Constant(2, 1.0);
    EXPECT_TRUE(control::apply_limits(s, lim));
    EXPECT_EQ(s.u, Vector::Constant(2, 1.0));
    EXPECT_EQ(s.integral_err, Vector::Constant(2, -100.0));
    EXPECT_FALSE(control::apply_limits(s, lim));
}

TEST(Step, FrozenPlantDescendsToRoot) {
    const auto model = plant::make_benchmark_scalar();
    const auto gains = scalar_gains(1.0, 5.0);
    // Frozen at x = 0 with a constant reference 0.5: z = -(0 - 0.5) = 0.5, so the root solves u + u^3 = 0.5.
    const ReferenceStack ref({{0.5, 0.0, 0.0}});
    const plant::PlantInstance plant{model, scalar(0.0), 0.0};
    control::ControllerState c{scalar(0.0), scalar(0.0), control::Mode::InverseFree};
    auto g0 = gains;
    g0.k_integral = {0.0};
    for (int i = 0; i < 5000; ++i) c = control::step(c, plant, ref, g0, 1e-3, Vector::Zero(1));
    EXPECT_NEAR(c.u(0), nafl::testing::cubic_root(0.5), 1e-9);
}

TEST(Step, DivergenceCarriesTime) {
    const auto model = plant::make_benchmark_scalar();
    const auto gains = scalar_gains(1.0, 1e6);
    const ReferenceStack ref({{3.0, 0.0, 0.0}});
    const plant::PlantInstance plant{model, scalar(0.0), 2.0};
    control::ControllerState c{scalar(2.0), scalar(0.0), control::Mode::InverseFree};
    control::ControllerLimits lim;
    lim.divergence_bound = 1e3;
    try {
        for (int i = 0; i < 10; ++i) c = control::step(c, plant, ref, gains, 1e-2, Vector::Zero(1), lim);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Divergence);
        ASSERT_TRUE(e.time().has_value());
        EXPECT_GT(*e.time(), 2.0);
    }
}

TEST(DescentProperty, FrozenResidualNeverIncreases) {
    const auto model = plant::make_benchmark_scalar();
    const auto gains = scalar_gains(1.0, 4.0);
    nafl::testing::Gen gen(32);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector x = scalar(gen.uniform(-2, 2));
        const Vector z = scalar(gen.uniform(-5, 5));
        const auto run = nafl::testing::frozen_descent(*model, x, z, scalar(gen.uniform(-2, 2)), gains, 2e-3, 5000);
        for (std::size_t i = 1; i < run.v_s.size(); ++i) EXPECT_LE(run.v_s[i], run.v_s[i - 1] + 1e-12);
        EXPECT_NEAR(run.u(0), nafl::testing::cubic_root(z(0) + x(0)), 1e-6);
    }
}
