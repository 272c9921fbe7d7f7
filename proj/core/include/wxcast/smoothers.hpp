#pragma once

#include "wxcast/series.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace wxcast::smoothers {

/// Behaviour of a spline outside [first knot, last knot].
enum class Extrapolation {
	/// Linear continuation; the natural-spline boundary condition.
	Natural,
	/// Continue the cubic polynomial of the outermost knot interval.
	BoundaryCubic,
};

/**
 * Natural cubic smoothing spline with one knot per training sample.
 *
 * Basis: N_1 = 1, N_2 = x, N_{d+2} = Delta_d - Delta_{D-1}, with
 * Delta_d(x) = ((x - k_d)_+^3 - (x - k_D)_+^3) / (k_D - k_d).
 */
struct SplineFit {
	std::vector<double> knots;
	Eigen::VectorXd coeffs;
	double smooth_lambda = 0.0;
	Extrapolation extrapolation = Extrapolation::Natural;

	double predict(double x) const;
	/// Values of all basis functions at x (or, for order 1..3, their derivatives).
	Eigen::VectorXd basis(double x, int order = 0) const;
};

/// Design matrix [X]_ij = N_j(k_i) for the natural-spline basis on `knots`.
Eigen::MatrixXd spline_design(std::span<const double> knots, std::span<const double> xs);

/**
 * Penalty matrix Omega_jk = integral N''_j N''_k over [k_1, k_D].
 *
 * Second derivatives are piecewise linear between knots, so each interval
 * contributes an exact Simpson term.
 */
Eigen::MatrixXd spline_penalty(std::span<const double> knots);

/**
 * Minimizes ||y - X theta||^2 + lambda theta^T Omega theta over the natural
 * cubic spline basis with knots at the training times.
 *
 * Requires at least 4 samples and strictly increasing knots.
 */
SplineFit fit_smoothing_spline(const Series &train, double lambda, Extrapolation extrapolation = Extrapolation::Natural);

/// Same fit with explicit (unsorted allowed, duplicates rejected) abscissae.
SplineFit fit_smoothing_spline(std::span<const double> xs, std::span<const double> ys, double lambda,
                               Extrapolation extrapolation = Extrapolation::Natural);

double spline_predict(const SplineFit &fit, double x);

enum class Kernel { Gaussian, Epanechnikov };

struct KernelConfig {
	Kernel kernel = Kernel::Gaussian;
	double bandwidth = 1.0;

	void validate() const;
};

/// K_lambda(x, xi). Gaussian: exp(-(x - xi)^2 / (2 lambda^2)) / sqrt(2 pi).
double kernel_value(Kernel kernel, double x, double xi, double bandwidth);

/// Nadaraya-Watson estimate at x; NoSupportError if all weights vanish.
double kernel_predict(const Series &train, const KernelConfig &config, double x);

/// Multi-input form: product kernel over the P coordinates of each sample.
/// `xs` is row-major with `dims` coordinates per sample.
double kernel_predict(std::span<const double> xs, std::size_t dims, std::span<const double> ys,
                      const KernelConfig &config, std::span<const double> query);

/// Population variance of the training values. ZeroVarianceError when constant.
double default_bandwidth(const Series &train);

} // namespace wxcast::smoothers
