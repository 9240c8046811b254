#include "botlab/estimate.hpp"
#include "botlab/inference.hpp"
#include "botlab/quadrature.hpp"
#include "botlab/sim.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace botlab;

namespace {

Scenario make_scenario() {
    ObserverSpec o;
    o.initial_position = Vec2(-4.0, -3.0);
    o.initial_heading = std::numbers::pi / 4;
    o.segments = {{0.0, 6.5, 0.2}, {6.5, 10.5, 0.0}, {10.5, 14.5, -0.22}, {14.5, 20.0, 0.0}};
    Scenario s;
    s.theta_true = Theta(4);
    s.theta_true << 2.8, 0.225, 3.8, -0.15;
    s.path = build_observer_path(o);
    s.trajectory_noise = IsotropicGaussian{0.01};
    return s;
}

const Scenario& scenario() {
    static const Scenario s = make_scenario();
    return s;
}

void BM_GaussHermite(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(gauss_hermite(static_cast<std::size_t>(st.range(0))));
}
BENCHMARK(BM_GaussHermite)->Arg(12)->Arg(40);

void BM_CriterionMn(benchmark::State& st) {
    const auto& s = scenario();
    const BearingProblem p(simulate(s, 1), s.model, s.path);
    for (auto _ : st) benchmark::DoNotOptimize(criterion_Mn(s.theta_true, p));
}
BENCHMARK(BM_CriterionMn);

void BM_LoglikJn(benchmark::State& st) {
    const auto& s = scenario();
    const BearingProblem p(simulate(s, 1), s.model, s.path);
    const auto cub = trajectory_noise_cubature(s.trajectory_noise, gauss_hermite(12));
    for (auto _ : st) benchmark::DoNotOptimize(loglik_Jn(s.theta_true, p, cub, s.observation_noise));
}
BENCHMARK(BM_LoglikJn);

void BM_Lse(benchmark::State& st) {
    const auto& s = scenario();
    const BearingProblem p(simulate(s, 1), s.model, s.path);
    for (auto _ : st) benchmark::DoNotOptimize(lse(p));
}
BENCHMARK(BM_Lse)->Unit(benchmark::kMillisecond);

void BM_FisherLegendre(benchmark::State& st) {
    const auto& s = scenario();
    FisherSettings fs;
    fs.legendre_panels = 10;
    for (auto _ : st) {
        benchmark::DoNotOptimize(parametric_fisher(s.model, s.theta_true, s.path, s.trajectory_noise,
                                                   s.observation_noise, gauss_hermite(12), fs));
    }
}
BENCHMARK(BM_FisherLegendre)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
