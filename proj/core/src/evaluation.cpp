#include "wxcast/evaluation.hpp"

#include "wxcast/errors.hpp"

#include <cmath>
#include <exception>
#include <sstream>
#include <type_traits>

namespace wxcast::eval {

namespace {

template <class... Ts>
struct overloaded : Ts... {
	using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Series reindexed(const Series &s) {
	Series out = s;
	out.t0 = 1;
	return out;
}

template <class F>
Series sample(F &&f, long first, std::size_t count) {
	Series s;
	s.t0 = first;
	s.values.resize(count);
	for (std::size_t i = 0; i < count; ++i) {
		s.values[i] = f(static_cast<double>(first + static_cast<long>(i)));
	}
	return s;
}

Series window_before(const Series &dataset, std::size_t origin, std::size_t length, const std::string &what) {
	if (origin < length) {
		throw InvalidArgument(what + " needs " + std::to_string(length) + " training samples before the forecast origin, " +
		                      "dataset has " + std::to_string(origin));
	}
	return reindexed(dataset.slice(origin - length, length));
}

struct Outcome {
	std::optional<double> train_rmse;
	Series fitted;
	Series forecast;
};

template <class Predictor>
Outcome curve_outcome(const Series &train, std::size_t F, Predictor &&predict) {
	Outcome o;
	o.fitted = sample(predict, train.t0, train.size());
	o.forecast = sample(predict, train.t_end() + 1, F);
	o.train_rmse = rmse(o.fitted.values, train.values);
	return o;
}

Outcome run_nexting(const Series &dataset, std::size_t origin, const NextingMethod &m, std::size_t D, std::size_t F) {
	const Series stream = reindexed(dataset.slice(origin - D, D + F));
	const Series train = stream.slice(0, D);
	UnitRange range = value_range(train);
	if (!(range.hi > range.lo)) {
		range.lo -= 0.5;
		range.hi += 0.5;
	}
	const Series unit = normalize_unit(stream, range.lo, range.hi);
	const std::optional<std::size_t> freeze =
	    m.freeze_after == 0 ? std::optional<std::size_t>(0) : std::optional<std::size_t>(m.freeze_after - 1);
	const Series raw_pred = nexting::run_online({unit}, m.coder, m.params, freeze).front();

	// next[k] is the prediction for stream sample k, made one step earlier.
	const std::size_t n = stream.size();
	std::vector<double> next(n, 0.0);
	for (std::size_t k = 1; k < n; ++k) {
		next[k] = range.from_unit(raw_pred.values[k - 1]);
	}
	if (D < 2 + m.max_shift) {
		throw InvalidArgument("nexting alignment needs more training samples than max_shift + 1");
	}
	const Series pred_train(std::vector<double>(next.begin() + 1, next.begin() + static_cast<long>(D)));
	const Series target_train(std::vector<double>(stream.values.begin() + 1, stream.values.begin() + static_cast<long>(D)));
	const nexting::Alignment a = nexting::align_affine(pred_train, target_train, m.max_shift);

	Outcome o;
	o.train_rmse = a.rmse;
	const auto shift = static_cast<std::size_t>(a.shift);
	o.fitted.t0 = 2;
	for (std::size_t k = 1; k < D && k + shift < n; ++k) {
		o.fitted.values.push_back(a.scale * next[k + shift] + a.offset);
	}
	o.forecast.t0 = static_cast<long>(D) + 1;
	for (std::size_t k = D; k < n && k + shift < n; ++k) {
		o.forecast.values.push_back(a.scale * next[k + shift] + a.offset);
	}
	return o;
}

} // namespace

double rmse(std::span<const double> pred, std::span<const double> target) {
	if (pred.size() != target.size()) {
		throw InvalidArgument("rmse: lengths differ (" + std::to_string(pred.size()) + " vs " +
		                      std::to_string(target.size()) + ")");
	}
	if (pred.empty()) {
		throw InvalidArgument("rmse: empty input");
	}
	double s = 0.0;
	for (std::size_t i = 0; i < pred.size(); ++i) {
		const double d = pred[i] - target[i];
		s += d * d;
	}
	return std::sqrt(s / static_cast<double>(pred.size()));
}

double rmse(const Series &pred, const Series &target) {
	return rmse(pred.view(), target.view());
}

std::size_t consecutive_within(std::span<const double> pred, std::span<const double> target, double half_width) {
	if (pred.size() != target.size()) {
		throw InvalidArgument("consecutive_within: lengths differ");
	}
	if (!(half_width > 0.0)) {
		throw InvalidArgument("consecutive_within: half width must be positive");
	}
	std::size_t n = 0;
	while (n < pred.size() && std::abs(pred[n] - target[n]) <= half_width) {
		++n;
	}
	return n;
}

std::size_t consecutive_within(const Series &pred, const Series &target, double half_width) {
	return consecutive_within(pred.view(), target.view(), half_width);
}

void Band::validate() const {
	if (!(inner > 0.0) || !(outer > inner)) {
		std::ostringstream os;
		os << "band requires outer > inner > 0 (got inner " << inner << ", outer " << outer << ")";
		throw InvalidArgument(os.str());
	}
}

std::string method_kind(const MethodSpec &spec) {
	return std::visit(overloaded {
	                      [](const PolynomialMethod &) { return std::string("polynomial"); },
	                      [](const RidgeMethod &) { return std::string("ridge"); },
	                      [](const RbfMethod &) { return std::string("rbf"); },
	                      [](const SplineMethod &) { return std::string("spline"); },
	                      [](const KernelMethod &) { return std::string("kernel"); },
	                      [](const ArimaMethod &) { return std::string("arima"); },
	                      [](const TreeMethod &) { return std::string("tree"); },
	                      [](const NextingMethod &) { return std::string("nexting"); },
	                  },
	                  spec);
}

std::string describe(const MethodSpec &spec) {
	std::ostringstream os;
	std::visit(overloaded {
	               [&](const PolynomialMethod &m) { os << "L=" << m.degree; },
	               [&](const RidgeMethod &m) {
		               os << "lambda=" << m.lambda << " basis=";
		               for (std::size_t k = 0; k < m.basis.size(); ++k) {
			               os << (k ? "+" : "") << m.basis[k].name();
		               }
	               },
	               [&](const RbfMethod &m) {
		               os << "N=" << m.n_basis << " sigma=" << m.sigma
		                  << (m.centers == linmodels::CenterPlacement::EvenlySpaced ? " even" : " data")
		                  << (m.bias ? " bias" : "");
	               },
	               [&](const SplineMethod &m) {
		               os << "lambda=" << m.lambda
		                  << (m.extrapolation == smoothers::Extrapolation::Natural ? " natural" : " cubic");
	               },
	               [&](const KernelMethod &m) {
		               os << (m.kernel == smoothers::Kernel::Gaussian ? "gaussian" : "epanechnikov");
		               if (m.bandwidth) {
			               os << " h=" << *m.bandwidth;
		               }
	               },
	               [&](const ArimaMethod &m) { os << m.order.to_string() << " periods=" << m.train_periods; },
	               [&](const TreeMethod &m) {
		               os << "leaves<=" << m.grow.max_leaves << " min_parent=" << m.grow.min_parent_size
		                  << " min_leaf=" << m.grow.min_node_size << " periods=" << m.periods;
	               },
	               [&](const NextingMethod &m) {
		               os << "gamma=" << m.params.gamma.front() << " alpha=" << m.params.alpha
		                  << " lambda=" << m.params.trace_lambda << " M=" << m.coder.n_tilings
		                  << " K=" << m.coder.tiles_per_dim;
	               },
	           },
	           spec);
	return os.str();
}

EvalReport evaluate_method(const Series &dataset, const MethodConfig &method, const Band &band,
                           const CompareOptions &options) {
	band.validate();
	const std::size_t D = options.train_length;
	const std::size_t F = options.forecast_length;
	if (D == 0 || F == 0) {
		throw InvalidArgument("compare: train and forecast lengths must be positive");
	}
	if (dataset.size() < F + 1) {
		throw InvalidArgument("compare: dataset of " + std::to_string(dataset.size()) + " samples is too short for a " +
		                      std::to_string(F) + "-sample holdout");
	}
	const std::size_t origin = dataset.size() - F;
	const Series holdout = dataset.slice(origin, F);

	const Outcome outcome = std::visit(
	    overloaded {
	        [&](const PolynomialMethod &m) {
		        const Series train = window_before(dataset, origin, D, "polynomial");
		        const auto fit = linmodels::fit_polynomial(train, m.degree);
		        return curve_outcome(train, F, [&](double x) { return fit.predict(x); });
	        },
	        [&](const RidgeMethod &m) {
		        const Series train = window_before(dataset, origin, D, "ridge");
		        const auto fit = linmodels::fit_ridge(train, m.basis, m.lambda);
		        return curve_outcome(train, F, [&](double x) { return fit.predict(x); });
	        },
	        [&](const RbfMethod &m) {
		        const Series train = window_before(dataset, origin, D, "rbf");
		        const auto cfg = linmodels::RbfConfig::for_series(train, m.n_basis, m.sigma, m.centers, m.bias);
		        const auto fit = linmodels::fit_rbf(train, cfg);
		        return curve_outcome(train, F, [&](double x) { return fit.predict(x); });
	        },
	        [&](const SplineMethod &m) {
		        const Series train = window_before(dataset, origin, D, "spline");
		        const auto fit = smoothers::fit_smoothing_spline(train, m.lambda, m.extrapolation);
		        return curve_outcome(train, F, [&](double x) { return fit.predict(x); });
	        },
	        [&](const KernelMethod &m) {
		        const Series train = window_before(dataset, origin, D, "kernel");
		        smoothers::KernelConfig cfg;
		        cfg.kernel = m.kernel;
		        cfg.bandwidth = m.bandwidth ? *m.bandwidth : smoothers::default_bandwidth(train);
		        return curve_outcome(train, F, [&](double x) { return smoothers::kernel_predict(train, cfg, x); });
	        },
	        [&](const ArimaMethod &m) {
		        m.order.validate();
		        if (m.train_periods < 1) {
			        throw InvalidArgument("arima: train_periods must be positive");
		        }
		        const int period = m.order.s() > 0 ? m.order.s() : 24;
		        const auto len = static_cast<std::size_t>(m.train_periods) * static_cast<std::size_t>(period);
		        const Series train = window_before(dataset, origin, len, "arima " + m.order.to_string());
		        const auto model = arima::css_estimate(train, m.order);
		        Outcome o;
		        o.forecast = arima::forecast(model, train, static_cast<int>(F));
		        return o;
	        },
	        [&](const TreeMethod &m) {
		        if (m.period < 1 || m.periods < 1) {
			        throw InvalidArgument("tree: period and periods must be positive");
		        }
		        const std::size_t len = static_cast<std::size_t>(m.period) * m.periods;
		        const Series train = window_before(dataset, origin, len, "tree");
		        const auto proto = tree::fit_prototype(train, m.period, m.periods, m.grow,
		                                               tree::MultiPeriodMode::Averaged, m.prune_alpha);
		        return curve_outcome(train, F, [&](double x) {
			        return tree::periodic_predict(proto, static_cast<long>(std::lround(x)));
		        });
	        },
	        [&](const NextingMethod &m) {
		        if (origin < D) {
			        throw InvalidArgument("nexting needs " + std::to_string(D) + " training samples before the origin");
		        }
		        return run_nexting(dataset, origin, m, D, F);
	        },
	    },
	    method.spec);

	EvalReport r;
	r.method = method.name.empty() ? method_kind(method.spec) : method.name;
	r.settings = describe(method.spec);
	r.train_rmse = outcome.train_rmse;
	r.fitted = outcome.fitted;
	r.forecast = outcome.forecast;
	const std::size_t m = std::min(outcome.forecast.size(), holdout.size());
	const std::span<const double> pred(outcome.forecast.values.data(), m);
	const std::span<const double> target(holdout.values.data(), m);
	r.inner_run = consecutive_within(pred, target, band.inner);
	r.outer_run = consecutive_within(pred, target, band.outer);
	return r;
}

std::vector<EvalReport> compare(const Series &dataset, const std::vector<MethodConfig> &methods, const Band &band,
                                const CompareOptions &options) {
	band.validate();
	std::vector<EvalReport> out;
	out.reserve(methods.size());
	for (const MethodConfig &method : methods) {
		try {
			out.push_back(evaluate_method(dataset, method, band, options));
		} catch (const std::exception &e) {
			EvalReport r;
			r.method = method.name.empty() ? method_kind(method.spec) : method.name;
			r.settings = describe(method.spec);
			r.failed = true;
			r.error = e.what();
			out.push_back(std::move(r));
		}
	}
	return out;
}

} // namespace wxcast::eval
