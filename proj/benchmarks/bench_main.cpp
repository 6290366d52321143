#include <benchmark/benchmark.h>

#include "nafl/aircraft.hpp"
#include "nafl/controller.hpp"
#include "nafl/numerics.hpp"
#include "nafl/oracle.hpp"
#include "nafl/scenario.hpp"
#include "nafl/simulate.hpp"

using namespace nafl;

namespace {

void BM_PseudoInverse3x3(benchmark::State& state) {
    const Matrix a = Matrix::Random(3, 3);
    for (auto _ : state) benchmark::DoNotOptimize(numerics::pseudo_inverse(a));
}
BENCHMARK(BM_PseudoInverse3x3);

void BM_Lyapunov6x6(benchmark::State& state) {
    const auto gains = sim::route_scenario().gains;
    const Matrix a = control::closed_loop_matrix(std::vector<int>{2, 2, 2}, gains);
    for (auto _ : state) benchmark::DoNotOptimize(numerics::solve_lyapunov(a));
}
BENCHMARK(BM_Lyapunov6x6);

void BM_AircraftJacobians(benchmark::State& state) {
    const aircraft::AeroModel aero;
    const aircraft::AircraftState s{0, 0, 1000, 50, 0.1, 0.05};
    const aircraft::AircraftControls u{0.08, 0.1, 0.3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(aircraft::jac_v_controls(s, u, aero, {}));
        benchmark::DoNotOptimize(aircraft::jac_v_state(s, u, aero, {}));
    }
}
BENCHMARK(BM_AircraftJacobians);

void BM_AircraftFiniteDifferenceJacobians(benchmark::State& state) {
    const auto model = aircraft::make_aircraft_model(aircraft::AeroModel{}, {});
    Vector x(6), u(3);
    x << 0, 0, 1000, 50, 0.1, 0.05;
    u << 0.08, 0.1, 0.3;
    for (auto _ : state) benchmark::DoNotOptimize(plant::finite_difference_jacobians(*model, x, u));
}
BENCHMARK(BM_AircraftFiniteDifferenceJacobians);

void BM_NewtonOracleAircraft(benchmark::State& state) {
    const auto model = aircraft::make_aircraft_model(aircraft::AeroModel{}, {});
    Vector x(6), guess(3);
    x << 0, 0, 1000, 50, 0, 0;
    guess << 0.1, 0.05, 0.3;
    const Vector z = Vector::Zero(3);
    for (auto _ : state) benchmark::DoNotOptimize(sim::newton_oracle(*model, x, z, guess));
}
BENCHMARK(BM_NewtonOracleAircraft);

void BM_RouteScenario(benchmark::State& state) {
    auto config = sim::route_scenario();
    config.duration = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_scenario(config));
}
BENCHMARK(BM_RouteScenario)->Arg(1)->Arg(25)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
