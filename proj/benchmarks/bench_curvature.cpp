#include <benchmark/benchmark.h>

#include <geoctl/dynamics.hpp>
#include <geoctl/geometry.hpp>
#include <geoctl/shaping.hpp>
#include <geoctl/stability.hpp>
#include <geoctl/systems.hpp>

using namespace geoctl;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

void BM_ChristoffelAnalytic(benchmark::State& state) {
    const SystemSpec cp = get_system("cart_pendulum");
    const Eigen::VectorXd q = vec2(0.2, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(christoffel(cp.M, q));
}
BENCHMARK(BM_ChristoffelAnalytic);

void BM_ChristoffelFiniteDifference(benchmark::State& state) {
    const SystemSpec cp = get_system("cart_pendulum");
    const MetricField fd(cp.chart, [m = cp.M](const Eigen::VectorXd& q) { return m.raw(q); });
    const Eigen::VectorXd q = vec2(0.2, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(christoffel(fd, q));
}
BENCHMARK(BM_ChristoffelFiniteDifference);

void BM_RiemannJacobiMetric(benchmark::State& state) {
    const SystemSpec cp = get_system("cart_pendulum");
    const MetricField G = jacobi_metric(cp.M, cp.V, 1.5);
    const Eigen::VectorXd q = vec2(0.2, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(riemann(G, q));
}
BENCHMARK(BM_RiemannJacobiMetric);

void BM_PointwiseMatching(benchmark::State& state) {
    const SystemSpec cp = get_system("cart_pendulum");
    const OpenLoopSystem sys = make_open_loop(cp, 1.5);
    const MetricField G_cl(cp.chart, [base = sys.G_ol](const Eigen::VectorXd& q) {
        Eigen::MatrixXd g = base.raw(q);
        g(1, 1) += 0.1;
        return g;
    });
    const TangentState s{vec2(0.1, 2.0), vec2(0.5, -0.3)};
    for (auto _ : state) benchmark::DoNotOptimize(solve_pointwise_matching(sys, G_cl, s));
}
BENCHMARK(BM_PointwiseMatching);

void BM_GeodesicStep(benchmark::State& state) {
    const SystemSpec sph = get_system("sphere");
    IntegratorConfig cfg;
    cfg.step = 1e-2;
    const TangentState s0{vec2(1.3, 0.0), vec2(0.2, 1.0)};
    for (auto _ : state)
        benchmark::DoNotOptimize(integrate_geodesic(sph.M, nullptr, {}, s0, 0.0, 1.0, cfg));
}
BENCHMARK(BM_GeodesicStep);

void BM_TidalEigenvalues(benchmark::State& state) {
    const SystemSpec cp = get_system("cart_pendulum");
    const MetricField G = jacobi_metric(cp.M, cp.V, 1.5);
    const TangentState s{vec2(0.1, 1.0), vec2(0.5, 0.5)};
    for (auto _ : state) benchmark::DoNotOptimize(stability_eigenvalues(G, s));
}
BENCHMARK(BM_TidalEigenvalues);

}  // namespace

BENCHMARK_MAIN();
