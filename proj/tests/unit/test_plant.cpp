#include <gtest/gtest.h>

#include "nafl/error.hpp"
#include "nafl/plant.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace nafl;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

/// Double integrator x'' = u^3 + u, y = x, as a two-state model without analytic Jacobians.
plant::ModelPtr double_integrator() {
    plant::SystemModel::Definition def;
    def.name = "double-integrator";
    def.n = 2;
    def.m = 1;
    def.alphas = {2};
    def.dynamics = [](const Vector& x, const Vector& u) { return vec({x(1), u(0) + u(0) * u(0) * u(0)}); };
    def.output = [](const Vector& x) { return Vector(x.head(1)); };
    def.v_map = [](const Vector&, const Vector& u) { return vec({u(0) + u(0) * u(0) * u(0)}); };
    def.derivative_stack = [](const Vector& x, const Vector&) { return Vector(x); };
    return std::make_shared<const plant::SystemModel>(def);
}

} // namespace

TEST(SystemModel, RejectsInconsistentDefinitions) {
    plant::SystemModel::Definition def;
    def.name = "bad";
    def.n = 1;
    def.m = 1;
    def.alphas = {2};
    def.dynamics = def.v_map = def.derivative_stack = [](const Vector& x, const Vector&) { return Vector(x); };
    def.output = [](const Vector& x) { return Vector(x); };
    EXPECT_THROW(plant::SystemModel{def}, Error);
    def.alphas = {1, 1};
    EXPECT_THROW(plant::SystemModel{def}, Error);
    def.alphas = {1};
    def.v_map = nullptr;
    EXPECT_THROW(plant::SystemModel{def}, Error);
}

TEST(SystemModel, ShapeErrorsAreReported) {
    const auto model = plant::make_benchmark_scalar();
    try {
        model->dynamics(Vector::Zero(2), Vector::Zero(1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Shape);
    }
}

TEST(Benchmark, DynamicsAndJacobians) {
    const auto model = plant::make_benchmark_scalar();
    EXPECT_DOUBLE_EQ(model->dynamics(vec({2.0}), vec({1.0}))(0), -2.0 + 1.0 + 1.0);
    const auto jac = plant::jacobians(*model, vec({0.3}), vec({-0.5}));
    EXPECT_DOUBLE_EQ(jac.dv_du(0, 0), 1.0 + 3.0 * 0.25);
    EXPECT_DOUBLE_EQ(jac.dv_dx(0, 0), -1.0);
    EXPECT_EQ(model->error_dim(), 1);
}

TEST(Benchmark, AnalyticJacobianMatchesFiniteDifference) {
    const auto model = plant::make_benchmark_scalar();
    nafl::testing::Gen gen(21);
    for (int trial = 0; trial < 100; ++trial) {
        const Vector x = gen.vector(1, -3, 3);
        const Vector u = gen.vector(1, -3, 3);
        const auto jac = plant::jacobians(*model, x, u);
        const Matrix fd_u = nafl::testing::central_jacobian([&](const Vector& uu) { return model->v(x, uu); }, u);
        EXPECT_NEAR(jac.dv_du(0, 0), fd_u(0, 0), 1e-5 * std::abs(fd_u(0, 0)));
    }
}

TEST(ErrorCoordinates, BlocksAndRates) {
    const auto model = double_integrator();
    const ReferenceStack ref({{1.0, 0.5, 0.25, 0.0}});
    const Vector x = vec({3.0, 2.0});
    const Vector u = vec({1.0});
    const Vector e = plant::error_coordinates(*model, x, u, ref);
    EXPECT_DOUBLE_EQ(e(0), 2.0);
    EXPECT_DOUBLE_EQ(e(1), 1.5);
    const Vector rates = plant::error_coordinate_rates(*model, x, u, ref);
    EXPECT_DOUBLE_EQ(rates(0), 1.5);
    EXPECT_DOUBLE_EQ(rates(1), 2.0 - 0.25);
}

TEST(ErrorCoordinates, MissingReferenceOrderIsConfigurationError) {
    const auto model = double_integrator();
    const ReferenceStack ref(std::vector<std::vector<double>>{{1.0}});
    try {
        plant::error_coordinates(*model, vec({0.0, 0.0}), vec({0.0}), ref);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Configuration);
    }
}

TEST(Jacobians, FallBackToFiniteDifferences) {
    const auto model = double_integrator();
    EXPECT_FALSE(model->has_analytic_jacobians());
    const auto jac = plant::jacobians(*model, vec({0.0, 0.0}), vec({2.0}));
    EXPECT_NEAR(jac.dv_du(0, 0), 13.0, 1e-6);
    EXPECT_NEAR(jac.dv_dx.cwiseAbs().maxCoeff(), 0.0, 1e-12);
}
