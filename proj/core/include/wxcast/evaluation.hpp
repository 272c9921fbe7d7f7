#pragma once

#include "wxcast/arima.hpp"
#include "wxcast/linear_models.hpp"
#include "wxcast/nexting.hpp"
#include "wxcast/series.hpp"
#include "wxcast/smoothers.hpp"
#include "wxcast/tree.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace wxcast::eval {

double rmse(std::span<const double> pred, std::span<const double> target);
double rmse(const Series &pred, const Series &target);

/// Length of the run of samples from index 0 with |pred - target| <= half_width.
std::size_t consecutive_within(std::span<const double> pred, std::span<const double> target, double half_width);
std::size_t consecutive_within(const Series &pred, const Series &target, double half_width);

struct Band {
	double inner = 1.0;
	double outer = 3.0;
	std::string unit;

	void validate() const;
};

struct PolynomialMethod {
	int degree = 6;
};

struct RidgeMethod {
	double lambda = 0.1;
	linmodels::BasisSet basis = linmodels::BasisSet({linmodels::BasisFunction::constant()});
};

struct RbfMethod {
	int n_basis = 4;
	double sigma = 6.3;
	linmodels::CenterPlacement centers = linmodels::CenterPlacement::EvenlySpaced;
	bool bias = true;
};

struct SplineMethod {
	double lambda = 1.0;
	smoothers::Extrapolation extrapolation = smoothers::Extrapolation::Natural;
};

struct KernelMethod {
	smoothers::Kernel kernel = smoothers::Kernel::Gaussian;
	/// Population variance of the training values when unset.
	std::optional<double> bandwidth;
};

struct ArimaMethod {
	arima::ArimaOrder order;
	/// Training length in units of the seasonal period (24 when non-seasonal).
	int train_periods = 2;
};

struct TreeMethod {
	tree::GrowConfig grow {1, 10, 5};
	double prune_alpha = 0.0;
	long period = 24;
	std::size_t periods = 1;
};

struct NextingMethod {
	nexting::NextingParams params;
	nexting::TileCoder coder;
	/// Number of samples (from the start of training) the learner may consume as targets.
	std::size_t freeze_after = 24;
	std::size_t max_shift = 1;
};

using MethodSpec = std::variant<PolynomialMethod, RidgeMethod, RbfMethod, SplineMethod, KernelMethod, ArimaMethod,
                                TreeMethod, NextingMethod>;

struct MethodConfig {
	std::string name;
	MethodSpec spec;
};

/// Short family label such as "polynomial" or "arima".
std::string method_kind(const MethodSpec &spec);
/// Human-readable parameter echo.
std::string describe(const MethodSpec &spec);

struct EvalReport {
	std::string method;
	std::optional<double> train_rmse;
	std::size_t inner_run = 0;
	std::size_t outer_run = 0;
	std::string settings;
	bool failed = false;
	std::string error;
	/// Model output over the training window and over the forecast window.
	Series fitted;
	Series forecast;
};

struct CompareOptions {
	std::size_t train_length = 24;
	std::size_t forecast_length = 24;
};

/**
 * Side-by-side comparison of methods. The last `forecast_length` samples of `dataset`
 * are the holdout; each method trains on the samples before them (re-indexed
 * to start at t = 1). Fit errors are recorded in the row instead of thrown.
 */
std::vector<EvalReport> compare(const Series &dataset, const std::vector<MethodConfig> &methods, const Band &band,
                                const CompareOptions &options = {});

/// One method, same protocol as compare but errors propagate.
EvalReport evaluate_method(const Series &dataset, const MethodConfig &method, const Band &band,
                           const CompareOptions &options = {});

} // namespace wxcast::eval
