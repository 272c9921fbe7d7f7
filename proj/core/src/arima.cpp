#include "wxcast/arima.hpp"

#include "wxcast/errors.hpp"
#include "wxcast/linear_models.hpp"

#include <Eigen/Dense>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

namespace wxcast::arima {

void ArimaOrder::validate() const {
	if (p < 0 || d < 0 || q < 0) {
		throw InvalidArgument("ARIMA orders must be nonnegative");
	}
	if (seasonal) {
		if (seasonal->P < 0 || seasonal->D < 0 || seasonal->Q < 0) {
			throw InvalidArgument("seasonal ARIMA orders must be nonnegative");
		}
		if (seasonal->s < 2) {
			throw InvalidArgument("seasonal period s must be at least 2");
		}
	}
}

std::string ArimaOrder::to_string() const {
	std::ostringstream os;
	os << "(" << p << "," << d << "," << q << ")";
	if (seasonal) {
		os << "(" << seasonal->P << "," << seasonal->D << "," << seasonal->Q << ")_" << seasonal->s;
	}
	return os.str();
}

ArimaModel ArimaModel::zeros(const ArimaOrder &order) {
	order.validate();
	ArimaModel m;
	m.order = order;
	m.phi.assign(static_cast<std::size_t>(order.p), 0.0);
	m.theta.assign(static_cast<std::size_t>(order.q), 0.0);
	m.sphi.assign(static_cast<std::size_t>(order.P()), 0.0);
	m.stheta.assign(static_cast<std::size_t>(order.Q()), 0.0);
	return m;
}

void ArimaModel::validate() const {
	order.validate();
	if (phi.size() != static_cast<std::size_t>(order.p) || theta.size() != static_cast<std::size_t>(order.q) ||
	    sphi.size() != static_cast<std::size_t>(order.P()) || stheta.size() != static_cast<std::size_t>(order.Q())) {
		throw InvalidArgument("ARIMA coefficient vectors do not match order " + order.to_string());
	}
	if (!(sigma2 >= 0.0)) {
		throw InvalidArgument("ARIMA shock variance must be nonnegative");
	}
}

std::vector<double> poly_multiply(const std::vector<double> &a, const std::vector<double> &b) {
	if (a.empty() || b.empty()) {
		return {};
	}
	std::vector<double> out(a.size() + b.size() - 1, 0.0);
	for (std::size_t i = 0; i < a.size(); ++i) {
		if (a[i] == 0.0) {
			continue;
		}
		for (std::size_t j = 0; j < b.size(); ++j) {
			out[i + j] += a[i] * b[j];
		}
	}
	return out;
}

std::vector<double> lag_operator(const std::vector<double> &coeffs, int step) {
	std::vector<double> poly(coeffs.size() * static_cast<std::size_t>(step) + 1, 0.0);
	poly[0] = 1.0;
	for (std::size_t k = 0; k < coeffs.size(); ++k) {
		poly[(k + 1) * static_cast<std::size_t>(step)] = -coeffs[k];
	}
	return poly;
}

namespace {

// 1 - sum c_j B^j  ->  c_j (drops the leading 1 and trailing zeros).
std::vector<double> operator_coefficients(const std::vector<double> &poly) {
	std::vector<double> c;
	for (std::size_t j = 1; j < poly.size(); ++j) {
		c.push_back(-poly[j]);
	}
	while (!c.empty() && c.back() == 0.0) {
		c.pop_back();
	}
	return c;
}

std::vector<double> differencing_operator(const ArimaOrder &order) {
	std::vector<double> poly {1.0};
	for (int i = 0; i < order.d; ++i) {
		poly = poly_multiply(poly, {1.0, -1.0});
	}
	if (order.seasonal) {
		std::vector<double> seasonal(static_cast<std::size_t>(order.s()) + 1, 0.0);
		seasonal.front() = 1.0;
		seasonal.back() = -1.0;
		for (int i = 0; i < order.D(); ++i) {
			poly = poly_multiply(poly, seasonal);
		}
	}
	return poly;
}

} // namespace

ExpandedForm expand_polynomials(const ArimaModel &model) {
	model.validate();
	const int s = std::max(model.order.s(), 1);
	const auto stationary = poly_multiply(lag_operator(model.phi, 1), lag_operator(model.sphi, s));
	const auto full = poly_multiply(stationary, differencing_operator(model.order));
	const auto ma = poly_multiply(lag_operator(model.theta, 1), lag_operator(model.stheta, s));
	ExpandedForm out;
	out.ar_full = operator_coefficients(full);
	out.ar_stationary = operator_coefficients(stationary);
	out.ma_full = operator_coefficients(ma);
	return out;
}

double ArimaModel::intercept() const {
	if (!order.integrated()) {
		if (!mean_centered) {
			return 0.0;
		}
		const auto ex = expand_polynomials(*this);
		const double sum = std::accumulate(ex.ar_stationary.begin(), ex.ar_stationary.end(), 0.0);
		return mu * (1.0 - sum);
	}
	return theta0;
}

Series difference(const Series &series, int d, std::optional<std::pair<int, int>> seasonal) {
	if (d < 0) {
		throw InvalidArgument("difference: d must be nonnegative");
	}
	int s = 0;
	int D = 0;
	if (seasonal) {
		s = seasonal->first;
		D = seasonal->second;
		if (s < 1 || D < 0) {
			throw InvalidArgument("difference: seasonal lag must be positive and D nonnegative");
		}
	}
	const std::size_t span = static_cast<std::size_t>(d) + static_cast<std::size_t>(s) * static_cast<std::size_t>(D);
	if (series.size() <= span) {
		throw InvalidArgument("difference: series of length " + std::to_string(series.size()) +
		                      " too short for differencing span " + std::to_string(span));
	}
	Series out = series;
	auto apply = [&](std::size_t lag) {
		std::vector<double> next(out.values.size() - lag);
		for (std::size_t i = 0; i < next.size(); ++i) {
			next[i] = out.values[i + lag] - out.values[i];
		}
		out.values = std::move(next);
		out.t0 += static_cast<long>(lag);
	};
	for (int i = 0; i < d; ++i) {
		apply(1);
	}
	for (int i = 0; i < D; ++i) {
		apply(static_cast<std::size_t>(s));
	}
	return out;
}

std::vector<double> css_residuals(const ArimaModel &model, const std::vector<double> &w) {
	const auto ex = expand_polynomials(model);
	const bool centred = !model.order.integrated() && model.mean_centered;
	const double level = centred ? model.mu : 0.0;
	const double drift = model.order.integrated() ? model.theta0 : 0.0;
	const std::size_t n = w.size();
	std::vector<double> a(n, 0.0);
	for (std::size_t t = 0; t < n; ++t) {
		double v = (w[t] - level) - drift;
		for (std::size_t j = 1; j <= ex.ar_stationary.size() && j <= t; ++j) {
			v -= ex.ar_stationary[j - 1] * (w[t - j] - level);
		}
		for (std::size_t j = 1; j <= ex.ma_full.size() && j <= t; ++j) {
			v += ex.ma_full[j - 1] * a[t - j];
		}
		a[t] = v;
	}
	return a;
}

namespace {

struct ParamLayout {
	std::size_t p, q, P, Q;
	bool drift;

	std::size_t size() const {
		return p + q + P + Q + (drift ? 1 : 0);
	}

	void unpack(const double *x, ArimaModel &m) const {
		std::size_t k = 0;
		for (std::size_t i = 0; i < p; ++i) {
			m.phi[i] = x[k++];
		}
		for (std::size_t i = 0; i < q; ++i) {
			m.theta[i] = x[k++];
		}
		for (std::size_t i = 0; i < P; ++i) {
			m.sphi[i] = x[k++];
		}
		for (std::size_t i = 0; i < Q; ++i) {
			m.stheta[i] = x[k++];
		}
		if (drift) {
			m.theta0 = x[k++];
		}
	}

	std::vector<double> pack(const ArimaModel &m) const {
		std::vector<double> x;
		x.insert(x.end(), m.phi.begin(), m.phi.end());
		x.insert(x.end(), m.theta.begin(), m.theta.end());
		x.insert(x.end(), m.sphi.begin(), m.sphi.end());
		x.insert(x.end(), m.stheta.begin(), m.stheta.end());
		if (drift) {
			x.push_back(m.theta0);
		}
		return x;
	}
};

double sum_of_squares(const std::vector<double> &a) {
	double s = 0.0;
	for (double v : a) {
		s += v * v;
	}
	return s;
}

struct ObjectiveContext {
	const ParamLayout *layout;
	ArimaModel *model;
	const std::vector<double> *w;
};

double css_objective(const gsl_vector *x, void *params) {
	auto *ctx = static_cast<ObjectiveContext *>(params);
	ctx->layout->unpack(x->data, *ctx->model);
	const double v = sum_of_squares(css_residuals(*ctx->model, *ctx->w));
	return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

struct MinimizerDeleter {
	void operator()(gsl_multimin_fminimizer *m) const {
		gsl_multimin_fminimizer_free(m);
	}
};
struct VectorDeleter {
	void operator()(gsl_vector *v) const {
		gsl_vector_free(v);
	}
};

void add_root_warnings(ArimaModel &m) {
	const auto ex = expand_polynomials(m);
	const double ar = max_inverse_root(ex.ar_stationary);
	if (ar >= 1.0 - 1e-8) {
		std::ostringstream os;
		os << "AR operator not stationary (max |inverse root| = " << ar << ")";
		m.warnings.push_back(os.str());
	}
	const double ma = max_inverse_root(ex.ma_full);
	if (ma >= 1.0 - 1e-8) {
		std::ostringstream os;
		os << "MA operator not invertible (max |inverse root| = " << ma << ")";
		m.warnings.push_back(os.str());
	}
}

} // namespace

std::vector<double> yule_walker(const std::vector<double> &values, int p) {
	if (p <= 0) {
		return {};
	}
	if (values.size() <= static_cast<std::size_t>(p)) {
		throw InvalidArgument("yule_walker: series too short for AR order");
	}
	const auto corr = acf_pacf(Series(values), p).acf;
	Eigen::MatrixXd R(p, p);
	for (int i = 0; i < p; ++i) {
		for (int j = 0; j < p; ++j) {
			R(i, j) = corr[static_cast<std::size_t>(std::abs(i - j))];
		}
	}
	Eigen::VectorXd r(p);
	for (int i = 0; i < p; ++i) {
		r[i] = corr[static_cast<std::size_t>(i + 1)];
	}
	const Eigen::VectorXd phi = R.colPivHouseholderQr().solve(r);
	return {phi.data(), phi.data() + phi.size()};
}

CssResult css_estimate_detailed(const Series &series, const ArimaOrder &order, const CssOptions &options) {
	order.validate();
	const Series w_series = difference(series, order.d, order.seasonal ? std::optional(std::pair(order.s(), order.D()))
	                                                                   : std::nullopt);
	const std::vector<double> &w = w_series.values;
	const std::size_t k = static_cast<std::size_t>(order.p + order.q + order.P() + order.Q());
	if (w.size() < 3 * (k + 1)) {
		throw InvalidArgument("css_estimate: differenced length " + std::to_string(w.size()) + " below 3*(" +
		                      std::to_string(k) + "+1) for order " + order.to_string());
	}

	ArimaModel model = ArimaModel::zeros(order);
	model.mu = mean(w);
	model.mean_centered = !order.integrated() && options.include_mean;
	const ParamLayout layout {static_cast<std::size_t>(order.p), static_cast<std::size_t>(order.q),
	                          static_cast<std::size_t>(order.P()), static_cast<std::size_t>(order.Q()),
	                          order.integrated() && options.estimate_drift};
	model.theta0 = order.integrated() ? (layout.drift ? model.mu : options.theta0) : 0.0;

	const double level = model.mean_centered ? model.mu : 0.0;
	std::vector<double> centred(w.size());
	std::transform(w.begin(), w.end(), centred.begin(), [&](double v) { return v - level; });

	CssResult result;
	if (options.init) {
		if (options.init->size() != layout.size()) {
			throw InvalidArgument("css_estimate: init has " + std::to_string(options.init->size()) +
			                      " entries, order needs " + std::to_string(layout.size()));
		}
		layout.unpack(options.init->data(), model);
	} else if (order.p > 0) {
		try {
			const auto yw = yule_walker(centred, order.p);
			std::copy(yw.begin(), yw.end(), model.phi.begin());
		} catch (const std::exception &) {
			// Constant differenced series: start from zero.
		}
	}

	const bool linear = order.q == 0 && order.P() == 0 && order.Q() == 0;
	if (layout.size() == 0) {
		result.closed_form = true;
	} else if (linear) {
		// Pure AR: the conditional sum of squares is an ordinary least-squares problem.
		const std::size_t n = w.size();
		const std::size_t cols = static_cast<std::size_t>(order.p) + (layout.drift ? 1 : 0);
		Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
		Eigen::VectorXd y(static_cast<Eigen::Index>(n));
		const double fixed = order.integrated() && !layout.drift ? model.theta0 : 0.0;
		for (std::size_t t = 0; t < n; ++t) {
			y[static_cast<Eigen::Index>(t)] = centred[t] - fixed;
			for (std::size_t j = 1; j <= static_cast<std::size_t>(order.p) && j <= t; ++j) {
				X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j - 1)) = centred[t - j];
			}
			if (layout.drift) {
				X(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(cols - 1)) = 1.0;
			}
		}
		const Eigen::VectorXd beta = linmodels::solve_ridge(X, y, 0.0);
		layout.unpack(beta.data(), model);
		result.closed_form = true;
	} else {
		static const auto previous_handler = gsl_set_error_handler_off();
		(void)previous_handler;
		ObjectiveContext ctx {&layout, &model, &w};
		gsl_multimin_function fn {&css_objective, layout.size(), &ctx};
		std::vector<double> best = layout.pack(model);
		double best_value = std::numeric_limits<double>::infinity();
		bool converged = false;
		int total = 0;

		std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> nm(
		    gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, layout.size()));
		std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(layout.size()));
		std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(layout.size()));

		for (int round = 0; round <= options.restarts && total < options.max_iterations; ++round) {
			for (std::size_t i = 0; i < layout.size(); ++i) {
				gsl_vector_set(x.get(), i, best[i]);
			}
			gsl_vector_set_all(step.get(), round == 0 ? 0.1 : 0.02);
			gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), step.get());
			converged = false;
			// Near the optimum the vertices can evaluate identically and the simplex stops
			// shrinking; a long run without any decrease in the best value counts as converged.
			const int stall_window = 100 * static_cast<int>(layout.size() + 1);
			int stalled = 0;
			double last_value = std::numeric_limits<double>::infinity();
			while (total < options.max_iterations) {
				++total;
				const int status = gsl_multimin_fminimizer_iterate(nm.get());
				const double fval = gsl_multimin_fminimizer_minimum(nm.get());
				const double size = gsl_multimin_fminimizer_size(nm.get());
				stalled = fval < last_value ? 0 : stalled + 1;
				last_value = std::min(last_value, fval);
				if (fval < best_value) {
					best_value = fval;
					const gsl_vector *xb = gsl_multimin_fminimizer_x(nm.get());
					best.assign(xb->data, xb->data + layout.size());
				}
				result.objective_trace.push_back(best_value);
				if (status == GSL_ENOPROG) {
					// Simplex cannot shrink further; treat as converged at the best vertex.
					converged = true;
					break;
				}
				if (status != GSL_SUCCESS) {
					break;
				}
				if (gsl_multimin_test_size(size, options.simplex_tolerance) == GSL_SUCCESS || stalled >= stall_window) {
					converged = true;
					break;
				}
			}
			if (!converged) {
				break;
			}
		}
		result.iterations = total;
		if (!converged) {
			throw EstimationError("css_estimate: Nelder-Mead did not converge within " +
			                          std::to_string(options.max_iterations) + " iterations for order " +
			                          order.to_string(),
			                      best, best_value);
		}
		layout.unpack(best.data(), model);
	}

	const auto residuals = css_residuals(model, w);
	result.objective = sum_of_squares(residuals);
	model.sigma2 = result.objective / static_cast<double>(w.size());
	add_root_warnings(model);
	result.model = std::move(model);
	return result;
}

ArimaModel css_estimate(const Series &series, const ArimaOrder &order, const CssOptions &options) {
	return css_estimate_detailed(series, order, options).model;
}

Series forecast(const ArimaModel &model, const Series &history, int lead) {
	model.validate();
	if (lead < 1) {
		throw InvalidArgument("forecast: lead must be positive");
	}
	const auto ex = expand_polynomials(model);
	const std::size_t n = history.size();
	const std::size_t span = static_cast<std::size_t>(model.order.differencing_span());
	const std::size_t ar_lag = static_cast<std::size_t>(model.order.p + model.order.s() * model.order.P()) + span;
	if (n < std::max(ar_lag, std::size_t {1}) || n <= span) {
		throw InvalidArgument("forecast: history of length " + std::to_string(n) +
		                      " shorter than the expanded AR lag " + std::to_string(ar_lag) +
		                      " / differencing span " + std::to_string(span));
	}

	// In-sample shocks from the conditional recursion, aligned to history indices.
	const Series w = difference(history, model.order.d,
	                            model.order.seasonal ? std::optional(std::pair(model.order.s(), model.order.D()))
	                                                 : std::nullopt);
	const auto a_w = css_residuals(model, w.values);
	std::vector<double> y = history.values;
	std::vector<double> a(n, 0.0);
	std::copy(a_w.begin(), a_w.end(), a.begin() + static_cast<std::ptrdiff_t>(span));

	const double c = model.intercept();
	Series out;
	out.t0 = history.t_end() + 1;
	out.period_hint = history.period_hint;
	out.unit = history.unit;
	for (int l = 1; l <= lead; ++l) {
		const std::size_t t = y.size();
		double v = c;
		for (std::size_t j = 1; j <= ex.ar_full.size(); ++j) {
			v += ex.ar_full[j - 1] * y[t - j];
		}
		for (std::size_t j = 1; j <= ex.ma_full.size() && j <= t; ++j) {
			v -= ex.ma_full[j - 1] * a[t - j];
		}
		y.push_back(v);
		a.push_back(0.0);
		out.values.push_back(v);
	}
	return out;
}

Correlogram acf_pacf(const Series &series, int max_lag) {
	if (max_lag < 1) {
		throw InvalidArgument("acf_pacf: max_lag must be positive");
	}
	const std::size_t n = series.size();
	if (static_cast<std::size_t>(max_lag) >= n) {
		throw InvalidArgument("acf_pacf: max_lag must be below the series length");
	}
	const double m = mean(series.values);
	auto autocov = [&](int k) {
		double s = 0.0;
		for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) {
			s += (series.values[t] - m) * (series.values[t - static_cast<std::size_t>(k)] - m);
		}
		return s / static_cast<double>(n);
	};
	const double c0 = autocov(0);
	if (!(c0 > 0.0)) {
		throw ZeroVarianceError("acf_pacf: series has zero variance");
	}
	Correlogram out;
	out.acf.resize(static_cast<std::size_t>(max_lag) + 1);
	out.acf[0] = 1.0;
	for (int k = 1; k <= max_lag; ++k) {
		out.acf[static_cast<std::size_t>(k)] = autocov(k) / c0;
	}

	// Durbin-Levinson.
	out.pacf.assign(static_cast<std::size_t>(max_lag) + 1, 0.0);
	out.pacf[0] = 1.0;
	std::vector<double> phi_prev;
	for (int k = 1; k <= max_lag; ++k) {
		double num = out.acf[static_cast<std::size_t>(k)];
		double den = 1.0;
		for (int j = 1; j < k; ++j) {
			num -= phi_prev[static_cast<std::size_t>(j - 1)] * out.acf[static_cast<std::size_t>(k - j)];
			den -= phi_prev[static_cast<std::size_t>(j - 1)] * out.acf[static_cast<std::size_t>(j)];
		}
		const double phi_kk = std::abs(den) > 0.0 ? num / den : 0.0;
		std::vector<double> phi(static_cast<std::size_t>(k));
		for (int j = 1; j < k; ++j) {
			phi[static_cast<std::size_t>(j - 1)] =
			    phi_prev[static_cast<std::size_t>(j - 1)] - phi_kk * phi_prev[static_cast<std::size_t>(k - j - 1)];
		}
		phi[static_cast<std::size_t>(k - 1)] = phi_kk;
		out.pacf[static_cast<std::size_t>(k)] = phi_kk;
		phi_prev = std::move(phi);
	}
	return out;
}

double max_inverse_root(const std::vector<double> &coeffs) {
	std::size_t m = coeffs.size();
	while (m > 0 && coeffs[m - 1] == 0.0) {
		--m;
	}
	if (m == 0) {
		return 0.0;
	}
	Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
	for (std::size_t j = 0; j < m; ++j) {
		companion(0, static_cast<Eigen::Index>(j)) = coeffs[j];
	}
	for (std::size_t i = 1; i < m; ++i) {
		companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
	}
	const Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
	return es.eigenvalues().cwiseAbs().maxCoeff();
}

Series simulate(const ArimaModel &model, int n, std::uint64_t seed) {
	model.validate();
	if (n < 1) {
		throw InvalidArgument("simulate: n must be positive");
	}
	const auto ex = expand_polynomials(model);
	if (!model.order.integrated()) {
		const double r = max_inverse_root(ex.ar_stationary);
		if (r >= 1.0) {
			std::ostringstream os;
			os << "simulate: AR operator is explosive or on the unit circle (max |inverse root| = " << r << ")";
			throw InstabilityError(os.str());
		}
	}
	const std::size_t max_lag = std::max(ex.ar_stationary.size(), ex.ma_full.size());
	const std::size_t burn = model.order.integrated() ? 0 : 10 * (max_lag + 1) + 100;
	const std::size_t total = burn + static_cast<std::size_t>(n);

	std::mt19937_64 rng(seed);
	std::vector<double> a(total, 0.0);
	if (model.sigma2 > 0.0) {
		std::normal_distribution<double> shock(0.0, std::sqrt(model.sigma2));
		for (double &v : a) {
			v = shock(rng);
		}
	}

	const double c = model.intercept();
	std::vector<double> w(total, 0.0);
	for (std::size_t t = 0; t < total; ++t) {
		double v = c + a[t];
		for (std::size_t j = 1; j <= ex.ar_stationary.size(); ++j) {
			// Pre-sample values sit at the process mean.
			const double prev = j <= t ? w[t - j] : (model.order.integrated() || !model.mean_centered ? 0.0 : model.mu);
			v += ex.ar_stationary[j - 1] * prev;
		}
		for (std::size_t j = 1; j <= ex.ma_full.size() && j <= t; ++j) {
			v -= ex.ma_full[j - 1] * a[t - j];
		}
		w[t] = v;
	}

	Series out;
	out.t0 = 1;
	out.values.assign(w.begin() + static_cast<std::ptrdiff_t>(burn), w.end());
	if (model.order.integrated()) {
		// Undo the differencing with zero initial conditions.
		const auto delta = operator_coefficients(differencing_operator(model.order));
		std::vector<double> y(out.values.size(), 0.0);
		for (std::size_t t = 0; t < y.size(); ++t) {
			double v = out.values[t];
			for (std::size_t j = 1; j <= delta.size() && j <= t; ++j) {
				v += delta[j - 1] * y[t - j];
			}
			y[t] = v;
		}
		out.values = std::move(y);
	}
	return out;
}

} // namespace wxcast::arima
