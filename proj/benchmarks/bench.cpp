#include <benchmark/benchmark.h>

#include "qcomb/comb.hpp"
#include "qcomb/network_sim.hpp"
#include "qcomb/realization.hpp"
#include "qcomb/tradeoff.hpp"

using namespace qcomb;

namespace {

const double kX = 1.0 / std::sqrt(3.0);

void bm_haar_unitary(benchmark::State &state) {
    int d = static_cast<int>(state.range(0));
    Rng rng = make_rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(haar_unitary(d, rng));
}
BENCHMARK(bm_haar_unitary)->Arg(2)->Arg(4)->Arg(6);

void bm_link_product(benchmark::State &state) {
    int d = static_cast<int>(state.range(0));
    Rng rng = make_rng(2, 0);
    LabeledOperator a = choi_of_unitary(haar_unitary(d, rng), "1", "0").op;
    LabeledOperator b = choi_of_unitary(haar_unitary(d, rng), "2", "1").op;
    for (auto _ : state) benchmark::DoNotOptimize(link(b, a, {"1"}));
}
BENCHMARK(bm_link_product)->Arg(2)->Arg(4)->Arg(6);

void bm_comb_check(benchmark::State &state) {
    int d = static_cast<int>(state.range(0));
    double y = y_from_x(kX, d);
    LabeledOperator r = r_total_op(kX, y, d);
    for (auto _ : state)
        benchmark::DoNotOptimize(check_deterministic_comb(r, 2));
}
BENCHMARK(bm_comb_check)->Arg(2)->Arg(3)->Arg(4);

void bm_realize(benchmark::State &state) {
    int d = static_cast<int>(state.range(0));
    double y = y_from_x(kX, d);
    Comb c = r_total(kX, y, d);
    for (auto _ : state) benchmark::DoNotOptimize(realize(c));
}
BENCHMARK(bm_realize)->Arg(2)->Arg(3);

void bm_mc_F(benchmark::State &state) {
    int d = static_cast<int>(state.range(0));
    double y = y_from_x(kX, d);
    for (auto _ : state)
        benchmark::DoNotOptimize(mc_F(kX, y, d, 1000, 7, 1));
}
BENCHMARK(bm_mc_F)->Arg(2)->Arg(3)->Arg(4);

void bm_trajectory_estimator(benchmark::State &state) {
    int d = static_cast<int>(state.range(0));
    double y = y_from_x(kX, d);
    for (auto _ : state) {
        FGEstimate e = estimate_FG_trajectories(kX, y, d, 1000, 9, 1);
        benchmark::DoNotOptimize(e);
    }
}
BENCHMARK(bm_trajectory_estimator)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
