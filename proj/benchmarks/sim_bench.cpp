#include <benchmark/benchmark.h>

#include "switchsim/experiments.hpp"
#include "switchsim/geometry.hpp"
#include "switchsim/scheduling.hpp"
#include "switchsim/simulator.hpp"
#include "switchsim/verify.hpp"

using namespace switchsim;

namespace {

RunConfig bench_run(std::uint64_t horizon, const Eigen::VectorXd& w) {
    RunConfig rc;
    rc.burn_in = 1000;
    rc.horizon = horizon;
    rc.batches = 20;
    rc.seed = 12345;
    rc.w = w;
    return rc;
}

void BM_SwitchSlots_OnOff(benchmark::State& state) {
    SwitchSetup setup = build_switch_setup(verify::on_off_n1_config());
    SwitchModel scaled(scale_to_heavy_traffic(setup.model.arrival, setup.geometry.nu(), 0.1),
                       setup.model.channel);
    const RunConfig rc = bench_run(static_cast<std::uint64_t>(state.range(0)), setup.geometry.nu());
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_switch(scaled, setup.geometry, rc));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SwitchSlots_OnOff)->Arg(1 << 18);

void BM_SwitchSlots_IqSwitch2x2(benchmark::State& state) {
    SwitchSetup setup = build_switch_setup(verify::iq_switch_2x2_config());
    SwitchModel scaled(scale_to_heavy_traffic(setup.model.arrival, setup.geometry.nu(), 0.1),
                       setup.model.channel);
    const RunConfig rc = bench_run(static_cast<std::uint64_t>(state.range(0)), setup.geometry.nu());
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_switch(scaled, setup.geometry, rc));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SwitchSlots_IqSwitch2x2)->Arg(1 << 16);

void BM_JsqSlots(benchmark::State& state) {
    const LoadBalanceModel base = build_jsq_model(verify::jsq_two_server_config());
    Eigen::VectorXd capacity(1);
    capacity << base.mu_sigma();
    LoadBalanceModel scaled(base.n, scale_to_heavy_traffic(base.arrival, capacity, 0.1),
                            base.service);
    const RunConfig rc = bench_run(static_cast<std::uint64_t>(state.range(0)),
                                   Eigen::VectorXd::Ones(base.n));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_jsq(scaled, rc));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_JsqSlots)->Arg(1 << 18);

void BM_ConeProjection(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    RngStream rng(9);
    Eigen::MatrixXd N(6, k);
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < 6; ++i) N(i, j) = rng.uniform01();
        N.col(j).normalize();
    }
    Eigen::VectorXd x(6);
    for (int i = 0; i < 6; ++i) x[i] = 2.0 * rng.uniform01() - 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(project_cone(x, N));
    }
}
BENCHMARK(BM_ConeProjection)->Arg(1)->Arg(2)->Arg(4);

void BM_MaxweightMatching(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    RngStream rng(11);
    std::vector<std::int64_t> w(static_cast<std::size_t>(N) * static_cast<std::size_t>(N));
    for (auto& v : w) v = static_cast<std::int64_t>(rng.uniform_index(1000));
    for (auto _ : state) {
        benchmark::DoNotOptimize(maxweight_matching(w, N));
    }
}
BENCHMARK(BM_MaxweightMatching)->Arg(4)->Arg(16)->Arg(64);

void BM_BuildRegion2D(benchmark::State& state) {
    const ChannelModel channel({}, {0.5, 0.5},
                               {{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}, {2, 1}, {1, 2}},
                                {{0, 0}, {1, 0}, {0, 1}}});
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_capacity_region(channel));
    }
}
BENCHMARK(BM_BuildRegion2D);

}  // namespace

BENCHMARK_MAIN();
