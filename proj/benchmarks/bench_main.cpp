#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include <uptake/changepoint.hpp>
#include <uptake/nowcast/forest.hpp>
#include <uptake/nowcast/gp.hpp>
#include <uptake/nowcast/linear.hpp>
#include <uptake/nowcast/panel.hpp>
#include <uptake/seasonal.hpp>
#include <uptake/stats.hpp>

namespace {

using namespace uptake;

constexpr YearMonth kStart{2000, 1};

std::vector<double> noisy_signal(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<double> out(n);
    for (int t = 0; t < n; ++t)
        out[t] = 50.0 + 8.0 * std::sin(2.0 * M_PI * t / 12.0) + unit(rng);
    return out;
}

}  // namespace

static void OlsSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd X(n, 5);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (int j = 1; j < 5; ++j) X(i, j) = unit(rng);
        y[i] = X.row(i).sum() + unit(rng);
    }
    for (auto _ : state) {
        auto fit = ols(X, y);
        benchmark::DoNotOptimize(fit.coefficients);
    }
}
BENCHMARK(OlsSolve)->RangeMultiplier(4)->Range(64, 1024);

static void StudentTail(benchmark::State& state) {
    const int df = static_cast<int>(state.range(0));
    for (auto _ : state) {
        double sum = 0.0;
        for (int i = 0; i <= 100; ++i) sum += t_sf(0.1 * i, df);
        benchmark::DoNotOptimize(sum);
    }
}
BENCHMARK(StudentTail)->Arg(1)->Arg(10)->Arg(120);

static void TippingScan(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto xv = noisy_signal(2, n);
    auto yv = noisy_signal(3, n);
    for (int t = n / 2; t < n; ++t) yv[t] += 0.5 * xv[t];
    MonthlyTimeSeries x(kStart, xv), y(kStart, yv);
    const SeriesWindow candidates{kStart.plus(12), kStart.plus(n - 13)};
    for (auto _ : state) {
        auto result = find_tipping_point(x, y, candidates);
        benchmark::DoNotOptimize(result.delta);
    }
}
BENCHMARK(TippingScan)->RangeMultiplier(2)->Range(72, 288);

static void Pacf(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    MonthlyTimeSeries s(kStart, noisy_signal(4, n));
    for (auto _ : state) {
        auto v = pacf(s, 12);
        benchmark::DoNotOptimize(v.data());
    }
}
BENCHMARK(Pacf)->RangeMultiplier(2)->Range(120, 480);

static void CoordinateDescentEnet(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(5);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<std::string> names;
    std::vector<MonthlyTimeSeries> series;
    std::vector<double> yv(n, 20.0);
    for (int j = 0; j < 4; ++j) {
        std::vector<double> col(n);
        for (int t = 0; t < n; ++t) col[t] = unit(rng);
        for (int t = 0; t < n; ++t) yv[t] += (j + 1) * 0.5 * col[t];
        names.push_back("q" + std::to_string(j));
        series.emplace_back(kStart, col);
    }
    for (int t = 0; t < n; ++t) yv[t] += 0.3 * unit(rng);
    MonthlyTimeSeries y(kStart, yv);
    auto panel = ExogPanel::make(names, series);
    const auto reg = Regularization::elastic_net(0.5, 0.5);
    for (auto _ : state) {
        auto model = fit_ar_exog(y, panel, 3, reg);
        benchmark::DoNotOptimize(model.alpha.data());
    }
}
BENCHMARK(CoordinateDescentEnet)->RangeMultiplier(2)->Range(96, 384);

static void GpLogMarginal(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Eigen::VectorXd x(n), y(n);
    const auto yv = noisy_signal(6, n);
    for (int t = 0; t < n; ++t) {
        x[t] = t;
        y[t] = yv[t];
    }
    const std::vector<MaternKernel> kernels{{12.0, 4.0}, {60.0, 1.0}};
    for (auto _ : state) {
        benchmark::DoNotOptimize(gp_log_marginal(x, y, kernels, 0.5));
    }
}
BENCHMARK(GpLogMarginal)->RangeMultiplier(2)->Range(32, 256);

static void ForestFit(benchmark::State& state) {
    const int trees = static_cast<int>(state.range(0));
    const int n = 200;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXd X(n, 4);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 4; ++j) X(i, j) = unit(rng);
        y[i] = X(i, 0) * 2.0 + X(i, 1) - X(i, 2) + 0.2 * unit(rng);
    }
    ForestParams params;
    params.n_trees = trees;
    params.seed = 11;
    for (auto _ : state) {
        auto model = forest_fit(X, y, params);
        benchmark::DoNotOptimize(model.trees.size());
    }
}
BENCHMARK(ForestFit)->RangeMultiplier(2)->Range(10, 80);

BENCHMARK_MAIN();
