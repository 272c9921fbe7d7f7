#include "wxcast/arima.hpp"
#include "wxcast/fixtures.hpp"
#include "wxcast/linear_models.hpp"
#include "wxcast/nexting.hpp"
#include "wxcast/smoothers.hpp"
#include "wxcast/tree.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace wxcast;

namespace {

const Series &wind_train() {
	static const Series train = split(fixtures::wind48(), 24).train;
	return train;
}

void BM_SolveRidge(benchmark::State &state) {
	const auto rows = static_cast<Eigen::Index>(state.range(0));
	std::mt19937_64 rng(1);
	std::normal_distribution<double> nd;
	Eigen::MatrixXd X(rows, 4);
	Eigen::VectorXd y(rows);
	for (Eigen::Index i = 0; i < rows; ++i) {
		for (Eigen::Index j = 0; j < 4; ++j) {
			X(i, j) = nd(rng);
		}
		y[i] = nd(rng);
	}
	for (auto _ : state) {
		benchmark::DoNotOptimize(linmodels::solve_ridge(X, y, 0.1));
	}
}
BENCHMARK(BM_SolveRidge)->Arg(24)->Arg(240)->Arg(2400);

void BM_PolynomialFit(benchmark::State &state) {
	for (auto _ : state) {
		benchmark::DoNotOptimize(linmodels::fit_polynomial(wind_train(), 6));
	}
}
BENCHMARK(BM_PolynomialFit);

void BM_SplineFit(benchmark::State &state) {
	const Series s = make_sine(1.0, 24.0, state.range(0));
	for (auto _ : state) {
		benchmark::DoNotOptimize(smoothers::fit_smoothing_spline(s, 1.0));
	}
}
BENCHMARK(BM_SplineFit)->Arg(24)->Arg(96)->Arg(384);

void BM_CssEstimate(benchmark::State &state) {
	const Series s = make_sine(1.0, 100.0, 100);
	for (auto _ : state) {
		benchmark::DoNotOptimize(arima::css_estimate(s, arima::ArimaOrder {2, 0, 0, std::nullopt}));
	}
}
BENCHMARK(BM_CssEstimate);

void BM_SeasonalCss(benchmark::State &state) {
	const Series s = make_sine(2.0, 24.0, 48);
	const arima::ArimaOrder order {0, 0, 3, arima::SeasonalOrder {1, 1, 0, 24}};
	for (auto _ : state) {
		benchmark::DoNotOptimize(arima::css_estimate(s, order));
	}
}
BENCHMARK(BM_SeasonalCss);

void BM_TreeGrow(benchmark::State &state) {
	const Series s = make_sine(1.0, 24.0, state.range(0));
	for (auto _ : state) {
		benchmark::DoNotOptimize(tree::grow(s, tree::GrowConfig {1, 10, 5}));
	}
}
BENCHMARK(BM_TreeGrow)->Arg(24)->Arg(240)->Arg(2400);

void BM_TdStep(benchmark::State &state) {
	const nexting::TileCoder coder;
	nexting::NextingLearner learner(coder.dim(), 1, nexting::NextingParams {});
	const double a = 0.3;
	const double b = 0.7;
	const auto phi_a = nexting::tile_features(std::span<const double>(&a, 1), coder);
	const auto phi_b = nexting::tile_features(std::span<const double>(&b, 1), coder);
	const std::vector<double> y {b};
	for (auto _ : state) {
		benchmark::DoNotOptimize(learner.td_step(phi_a, phi_b, y));
	}
}
BENCHMARK(BM_TdStep);

void BM_RunOnline(benchmark::State &state) {
	const Series unit = normalize_unit(make_sine(1.0, 100.0, state.range(0)), -1.0, 1.0);
	for (auto _ : state) {
		benchmark::DoNotOptimize(nexting::run_online({unit}, nexting::TileCoder {}, nexting::NextingParams {}));
	}
}
BENCHMARK(BM_RunOnline)->Arg(1001);

} // namespace

BENCHMARK_MAIN();
