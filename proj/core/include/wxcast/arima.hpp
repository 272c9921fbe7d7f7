#pragma once

#include "wxcast/series.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wxcast::arima {

struct SeasonalOrder {
	int P = 0;
	int D = 0;
	int Q = 0;
	int s = 0;

	friend bool operator==(const SeasonalOrder &, const SeasonalOrder &) = default;
};

/// (p, d, q) with an optional multiplicative seasonal part (P, D, Q)_s.
struct ArimaOrder {
	int p = 0;
	int d = 0;
	int q = 0;
	std::optional<SeasonalOrder> seasonal;

	int P() const noexcept {
		return seasonal ? seasonal->P : 0;
	}
	int D() const noexcept {
		return seasonal ? seasonal->D : 0;
	}
	int Q() const noexcept {
		return seasonal ? seasonal->Q : 0;
	}
	int s() const noexcept {
		return seasonal ? seasonal->s : 0;
	}
	/// Total differencing lag d + s*D.
	int differencing_span() const noexcept {
		return d + s() * D();
	}
	bool integrated() const noexcept {
		return d + D() > 0;
	}

	void validate() const;
	std::string to_string() const;

	friend bool operator==(const ArimaOrder &, const ArimaOrder &) = default;
};

/**
 * phi_p(B) Phi_P(B^s) (1-B)^d (1-B^s)^D y[t] = c + theta_q(B) Theta_Q(B^s) a[t]
 *
 * Operator convention: phi_p(B) = 1 - phi_1 B - ..., theta_q(B) = 1 - theta_1 B - ...
 * The constant c is mu * phi_p(1) Phi_P(1) when the series is mean-centred
 * (d + D = 0) and theta0 otherwise.
 */
struct ArimaModel {
	ArimaOrder order;
	std::vector<double> phi;
	std::vector<double> theta;
	std::vector<double> sphi;
	std::vector<double> stheta;
	double theta0 = 0.0;
	double sigma2 = 0.0;
	double mu = 0.0;
	/// Whether mu is subtracted before the ARMA recursion (only meaningful for d + D = 0).
	bool mean_centered = true;
	/// Stationarity / invertibility notes; the estimate is kept either way.
	std::vector<std::string> warnings;

	/// Model with zero coefficients sized for `order`.
	static ArimaModel zeros(const ArimaOrder &order);

	void validate() const;
	/// Constant term of the expanded difference equation.
	double intercept() const;
};

/// Coefficients of 1 - sum c_j B^j for the full operators; index j-1 holds lag j.
struct ExpandedForm {
	/// phi_p(B) Phi_P(B^s) (1-B)^d (1-B^s)^D.
	std::vector<double> ar_full;
	/// phi_p(B) Phi_P(B^s) only (the stationary AR side).
	std::vector<double> ar_stationary;
	/// theta_q(B) Theta_Q(B^s).
	std::vector<double> ma_full;
};

/// Product of two polynomials given as coefficient arrays (constant term first).
std::vector<double> poly_multiply(const std::vector<double> &a, const std::vector<double> &b);

/// Operator 1 - sum c_k B^{step k} as a coefficient array.
std::vector<double> lag_operator(const std::vector<double> &coeffs, int step = 1);

ExpandedForm expand_polynomials(const ArimaModel &model);

/// Applies (1-B)^d and then (1-B^s)^D. Output length shrinks by d + s*D; t0 advances by the same.
Series difference(const Series &series, int d, std::optional<std::pair<int, int>> seasonal = std::nullopt);

/// Conditional residuals a[t] of the model over the differenced series `w`,
/// pre-sample shocks and pre-sample (centred) differences set to zero.
std::vector<double> css_residuals(const ArimaModel &model, const std::vector<double> &w);

struct CssOptions {
	/// Overrides the Yule-Walker / zero starting point; layout phi, theta, Phi, Theta[, theta0].
	std::optional<std::vector<double>> init;
	/// Subtract the sample mean before fitting when d + D = 0.
	bool include_mean = true;
	/// Treat theta0 as a free parameter when d + D > 0.
	bool estimate_drift = false;
	/// Fixed theta0 when d + D > 0 and the drift is not estimated.
	double theta0 = 0.0;
	int max_iterations = 20000;
	/// Simplex size at which the Nelder-Mead search is considered converged.
	double simplex_tolerance = 1e-10;
	int restarts = 2;
};

struct CssResult {
	ArimaModel model;
	double objective = 0.0;
	int iterations = 0;
	/// Best objective after each optimizer iteration (nonincreasing).
	std::vector<double> objective_trace;
	bool closed_form = false;
};

/**
 * Conditional-sum-of-squares estimate.
 *
 * Pure non-seasonal AR models (q = P = Q = 0) are linear in the parameters
 * and solved exactly by least squares; everything else goes through a
 * Nelder-Mead simplex search. Throws EstimationError when the iteration
 * budget runs out.
 */
CssResult css_estimate_detailed(const Series &series, const ArimaOrder &order, const CssOptions &options = {});

ArimaModel css_estimate(const Series &series, const ArimaOrder &order, const CssOptions &options = {});

/// MMSE forecasts for leads 1..lead from the end of `history`.
Series forecast(const ArimaModel &model, const Series &history, int lead);

struct Correlogram {
	std::vector<double> acf;
	std::vector<double> pacf;
};

/// Sample ACF and PACF (Durbin-Levinson) for lags 0..max_lag.
Correlogram acf_pacf(const Series &series, int max_lag);

/// Yule-Walker AR(p) coefficients from the sample ACF.
std::vector<double> yule_walker(const std::vector<double> &values, int p);

/// Largest |1/root| of 1 - sum c_j z^j (below 1 means all roots outside the unit circle).
double max_inverse_root(const std::vector<double> &coeffs);

/// Deterministic Gaussian simulation. InstabilityError if d + D = 0 and the AR side is explosive.
Series simulate(const ArimaModel &model, int n, std::uint64_t seed);

} // namespace wxcast::arima
