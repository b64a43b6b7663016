#include "vttn/datagen.hpp"
#include "vttn/regressor.hpp"
#include "vttn/solvers.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace vttn;

VolterraModel bench_model(Index d, Index rank) {
    std::vector<Index> ranks(static_cast<std::size_t>(d - 1), rank);
    return init_right_orthogonal(1, 1, 7, d, ranks, 7);
}

void BM_SimulateSample(benchmark::State& state) {
    const Index d = state.range(0);
    const VolterraModel model = bench_model(d, 8);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Eigen::VectorXd u(model.input_dim());
    u(0) = 1.0;
    for (Index i = 1; i < u.size(); ++i) u(i) = uniform(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_sample(model, u));
    }
}
BENCHMARK(BM_SimulateSample)->Arg(3)->Arg(6)->Arg(10);

void BM_KronPower(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Eigen::VectorXd u(8);
    for (Index i = 0; i < 8; ++i) u(i) = uniform(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kron_power(u, state.range(0)));
    }
}
BENCHMARK(BM_KronPower)->Arg(2)->Arg(4)->Arg(6);

void BM_BuildUk(benchmark::State& state) {
    const Index d = 4;
    const VolterraModel model = bench_model(d, state.range(0));
    TimeSeriesDataset data;
    data.inputs = datagen::uniform_inputs(700, 11);
    data.outputs.resize(700, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_Uk(data, model, 1));
    }
}
BENCHMARK(BM_BuildUk)->Arg(4)->Arg(8);

void BM_SolveCore(benchmark::State& state) {
    const Index cols = state.range(0);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(700, cols);
    Eigen::VectorXd b(700);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < 700; ++i) a(i, j) = normal(rng);
    }
    for (Index i = 0; i < 700; ++i) b(i) = normal(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_core(a, b));
    }
}
BENCHMARK(BM_SolveCore)->Arg(128)->Arg(512)->Arg(2048);

void BM_SplitSupercore(benchmark::State& state) {
    const Index rank = state.range(0);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal(0.0, 1.0);
    DenseTensor w({rank, 64, rank});
    for (Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            split_supercore(w, 8, SweepDirection::kLeftToRight, SvdTolerance::machine_default(), 50));
    }
}
BENCHMARK(BM_SplitSupercore)->Arg(4)->Arg(8);

void BM_MalsIdentify(benchmark::State& state) {
    const Index d = state.range(0);
    TimeSeriesDataset data;
    data.inputs = datagen::uniform_inputs(700, 42);
    data.outputs = datagen::simulate_truth_exp(d, data.inputs.col(0));
    for (auto _ : state) {
        SolverConfig config;
        config.residual_tol = 1e-4;
        config.seed = 1;
        benchmark::DoNotOptimize(identify(data, 1, 1, 7, d, config));
    }
}
BENCHMARK(BM_MalsIdentify)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
