#include "wxcast/smoothers.hpp"

#include "wxcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace wxcast::smoothers {

namespace {

// d^order/dx^order of (x - k)_+^3.
double truncated_cubic(double x, double k, int order) {
	const double u = x - k;
	if (u <= 0.0) {
		return 0.0;
	}
	switch (order) {
	case 0:
		return u * u * u;
	case 1:
		return 3.0 * u * u;
	case 2:
		return 6.0 * u;
	default:
		return 6.0;
	}
}

// Basis values (or derivatives) for knots k_1 < ... < k_D.
Eigen::VectorXd natural_basis(std::span<const double> knots, double x, int order) {
	const std::size_t D = knots.size();
	Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(D));
	out[0] = order == 0 ? 1.0 : 0.0;
	out[1] = order == 0 ? x : (order == 1 ? 1.0 : 0.0);
	const double kD = knots[D - 1];
	auto delta = [&](std::size_t d) {
		return (truncated_cubic(x, knots[d], order) - truncated_cubic(x, kD, order)) / (kD - knots[d]);
	};
	const double last = delta(D - 2);
	for (std::size_t d = 0; d + 2 < D; ++d) {
		out[static_cast<Eigen::Index>(d + 2)] = delta(d) - last;
	}
	return out;
}

void check_knots(std::span<const double> knots) {
	for (std::size_t i = 1; i < knots.size(); ++i) {
		if (!(knots[i] > knots[i - 1])) {
			std::ostringstream os;
			os << "spline knots must be distinct; found " << knots[i - 1] << " twice";
			throw InvalidArgument(os.str());
		}
	}
}

} // namespace

Eigen::VectorXd SplineFit::basis(double x, int order) const {
	return natural_basis(knots, x, order);
}

double SplineFit::predict(double x) const {
	if (extrapolation == Extrapolation::BoundaryCubic && knots.size() >= 2) {
		const double first = knots.front();
		const double last = knots.back();
		if (x > last || x < first) {
			// Taylor expansion of the outermost cubic piece. Value and the first two
			// derivatives are continuous at the knot; the third is constant on the piece.
			const bool right = x > last;
			const double anchor = right ? last : first;
			const double inner = right ? knots[knots.size() - 2] : knots[1];
			const double mid = 0.5 * (anchor + inner);
			const double h = x - anchor;
			const double f0 = coeffs.dot(natural_basis(knots, anchor, 0));
			const double f1 = coeffs.dot(natural_basis(knots, anchor, 1));
			const double f2 = coeffs.dot(natural_basis(knots, anchor, 2));
			const double f3 = coeffs.dot(natural_basis(knots, mid, 3));
			return f0 + h * (f1 + h * (f2 / 2.0 + h * f3 / 6.0));
		}
	}
	return coeffs.dot(natural_basis(knots, x, 0));
}

Eigen::MatrixXd spline_design(std::span<const double> knots, std::span<const double> xs) {
	if (knots.size() < 2) {
		throw InvalidArgument("natural spline basis needs at least two knots");
	}
	Eigen::MatrixXd X(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(knots.size()));
	for (std::size_t i = 0; i < xs.size(); ++i) {
		X.row(static_cast<Eigen::Index>(i)) = natural_basis(knots, xs[i], 0).transpose();
	}
	return X;
}

Eigen::MatrixXd spline_penalty(std::span<const double> knots) {
	check_knots(knots);
	const auto D = static_cast<Eigen::Index>(knots.size());
	Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(D, D);
	for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
		const double a = knots[i];
		const double b = knots[i + 1];
		// N'' is linear on [a, b]; Simpson is exact for the quadratic products.
		const Eigen::VectorXd fa = natural_basis(knots, a, 2);
		const Eigen::VectorXd fm = natural_basis(knots, 0.5 * (a + b), 2);
		const Eigen::VectorXd fb = natural_basis(knots, b, 2);
		omega += (b - a) / 6.0 * (fa * fa.transpose() + 4.0 * fm * fm.transpose() + fb * fb.transpose());
	}
	return omega;
}

SplineFit fit_smoothing_spline(std::span<const double> xs, std::span<const double> ys, double lambda,
                               Extrapolation extrapolation) {
	if (xs.size() != ys.size()) {
		throw InvalidArgument("fit_smoothing_spline: x and y lengths differ");
	}
	if (xs.size() < 4) {
		throw InvalidArgument("fit_smoothing_spline: at least 4 samples required");
	}
	if (!(lambda >= 0.0)) {
		throw InvalidArgument("fit_smoothing_spline: lambda must be nonnegative");
	}
	std::vector<std::size_t> order(xs.size());
	std::iota(order.begin(), order.end(), std::size_t {0});
	std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
	std::vector<double> knots(xs.size());
	Eigen::VectorXd y(static_cast<Eigen::Index>(xs.size()));
	for (std::size_t i = 0; i < order.size(); ++i) {
		knots[i] = xs[order[i]];
		y[static_cast<Eigen::Index>(i)] = ys[order[i]];
	}
	check_knots(knots);

	const Eigen::MatrixXd X = spline_design(knots, knots);
	const Eigen::MatrixXd omega = spline_penalty(knots);
	Eigen::MatrixXd A = X.transpose() * X + lambda * omega;
	const Eigen::VectorXd rhs = X.transpose() * y;

	auto try_solve = [&](const Eigen::MatrixXd &M, Eigen::VectorXd &out) {
		const Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
		if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
			return false;
		}
		const auto d = ldlt.vectorD();
		const double dmax = d.cwiseAbs().maxCoeff();
		if (!(dmax > 0.0) || d.minCoeff() <= 1e-14 * dmax) {
			return false;
		}
		out = ldlt.solve(rhs);
		return out.allFinite();
	};

	SplineFit fit;
	fit.knots = std::move(knots);
	fit.smooth_lambda = lambda;
	fit.extrapolation = extrapolation;
	if (!try_solve(A, fit.coeffs)) {
		const double jitter = 1e-12 * A.trace();
		A.diagonal().array() += jitter;
		if (!try_solve(A, fit.coeffs)) {
			std::ostringstream os;
			os << "fit_smoothing_spline: penalized system singular (D=" << xs.size() << ", lambda=" << lambda << ")";
			throw SingularSystemError(os.str());
		}
	}
	return fit;
}

SplineFit fit_smoothing_spline(const Series &train, double lambda, Extrapolation extrapolation) {
	const auto xs = train.times();
	return fit_smoothing_spline(xs, train.values, lambda, extrapolation);
}

double spline_predict(const SplineFit &fit, double x) {
	return fit.predict(x);
}

void KernelConfig::validate() const {
	if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
		throw InvalidArgument("kernel bandwidth must be positive and finite");
	}
}

double kernel_value(Kernel kernel, double x, double xi, double bandwidth) {
	const double u = (x - xi) / bandwidth;
	switch (kernel) {
	case Kernel::Gaussian:
		return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
	case Kernel::Epanechnikov:
		return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
	}
	return 0.0;
}

double kernel_predict(std::span<const double> xs, std::size_t dims, std::span<const double> ys,
                      const KernelConfig &config, std::span<const double> query) {
	config.validate();
	if (dims == 0 || xs.size() != ys.size() * dims || query.size() != dims) {
		throw InvalidArgument("kernel_predict: inconsistent sample dimensions");
	}
	if (ys.empty()) {
		throw InvalidArgument("kernel_predict: no training samples");
	}
	double num = 0.0;
	double den = 0.0;
	for (std::size_t i = 0; i < ys.size(); ++i) {
		double w = 1.0;
		for (std::size_t j = 0; j < dims; ++j) {
			w *= kernel_value(config.kernel, query[j], xs[i * dims + j], config.bandwidth);
		}
		num += w * ys[i];
		den += w;
	}
	if (!(den > 0.0)) {
		std::ostringstream os;
		os << "kernel_predict: no kernel support at x=" << query[0] << " (bandwidth " << config.bandwidth << ")";
		throw NoSupportError(os.str());
	}
	return num / den;
}

double kernel_predict(const Series &train, const KernelConfig &config, double x) {
	const auto xs = train.times();
	const double q[1] = {x};
	return kernel_predict(xs, 1, train.values, config, q);
}

double default_bandwidth(const Series &train) {
	if (train.size() < 2) {
		throw InvalidArgument("default_bandwidth: at least two samples required");
	}
	const double v = population_variance(train.values);
	if (!(v > 0.0)) {
		throw ZeroVarianceError("default_bandwidth: training values have zero variance");
	}
	return v;
}

} // namespace wxcast::smoothers
