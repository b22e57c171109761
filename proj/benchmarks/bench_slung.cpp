#include <benchmark/benchmark.h>

#include "slung/control.hpp"
#include "slung/dqmath.hpp"
#include "slung/dynamics.hpp"
#include "slung/sim.hpp"

using namespace slung;

static void BM_DqMul(benchmark::State& state) {
    DualQuaternion a = from_pose(Quaternion::from_axis_angle(Vector3(1, 2, 3).normalized(), 0.4), Vector3(1, 0, 2));
    const DualQuaternion b = from_pose(Quaternion::from_axis_angle(Vector3(0, 1, 0), 0.1), Vector3(0, 0.1, 0));
    for (auto _ : state) {
        a = a * b;
        benchmark::DoNotOptimize(a);
    }
}
BENCHMARK(BM_DqMul);

static void BM_DqLog(benchmark::State& state) {
    const DualQuaternion a =
        from_pose(Quaternion::from_axis_angle(Vector3(1, 2, 3).normalized(), 0.4), Vector3(1, 0, 2));
    for (auto _ : state) benchmark::DoNotOptimize(dq_log(a));
}
BENCHMARK(BM_DqLog);

static void BM_RigidDynamics(benchmark::State& state) {
    const auto p = RigidBodyParams::make(0.7, Vector3(0.005, 0.007, 0.006).asDiagonal());
    const RigidBodyState s{from_pose(Quaternion::from_axis_angle(Vector3(0, 0, 1), 0.3), Vector3(0.1, 0.2, 0.3)),
                           {Vector3(0.4, -0.2, 1.0), Vector3(0.1, 0.0, 0.2)}};
    const WrenchInput u{Vector3(0.0, 0.001, 0.0), Vector3(0.0, 0.0, 7.0)};
    for (auto _ : state) benchmark::DoNotOptimize(rigid_dynamics(p, s, u, {}));
}
BENCHMARK(BM_RigidDynamics);

static void BM_TautControlStep(benchmark::State& state) {
    const Scenario sc = Scenario::nominal();
    TautState s;
    s.load_config = {Vector3(0.05, 0.0, 1.0).normalized(), Vector3(0.1, 0.0, 0.8)};
    LoadReference ref;
    ref.pos = Vector3(0.0, 0.0, 0.9);
    ControllerMemory mem;
    for (auto _ : state) {
        auto out = taut_control_step(sc.params, s, ref, sc.taut_gains, sc.sim.gravity, mem, {});
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_TautControlStep);

static void BM_NominalRun(benchmark::State& state) {
    const Scenario sc = Scenario::nominal();
    for (auto _ : state) benchmark::DoNotOptimize(run(sc));
}
BENCHMARK(BM_NominalRun)->Unit(benchmark::kMillisecond);

static void BM_MonteCarlo(benchmark::State& state) {
    Scenario sc = Scenario::nominal();
    sc.noise.enabled = true;
    sc.sim.seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(sc, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_MonteCarlo)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
