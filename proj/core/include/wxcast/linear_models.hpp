#pragma once

#include "wxcast/series.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wxcast::linmodels {

enum class BasisKind { Constant, Monomial, Sinusoid, Gaussian };

/**
 * One scalar basis function g_k(x).
 *
 *   Constant   g(x) = 1
 *   Monomial   g(x) = x^degree
 *   Sinusoid   g(x) = cos(2 pi x / period + phase)
 *   Gaussian   g(x) = exp(-(x - center)^2 / (2 sigma^2))
 */
struct BasisFunction {
	BasisKind kind = BasisKind::Constant;
	int degree = 0;
	double period = 1.0;
	double phase = 0.0;
	double center = 0.0;
	double sigma = 1.0;

	static BasisFunction constant();
	static BasisFunction monomial(int degree);
	static BasisFunction sinusoid(double period, double phase);
	static BasisFunction gaussian(double center, double sigma);

	double operator()(double x) const noexcept;
	std::string name() const;

	friend bool operator==(const BasisFunction &, const BasisFunction &) = default;
};

/// Ordered, nonempty list of basis functions.
class BasisSet {
public:
	explicit BasisSet(std::vector<BasisFunction> functions);

	/// Monomials x^0 .. x^degree.
	static BasisSet polynomial(int degree);

	std::size_t size() const noexcept {
		return functions_.size();
	}
	const BasisFunction &operator[](std::size_t k) const {
		return functions_[k];
	}
	const std::vector<BasisFunction> &functions() const noexcept {
		return functions_;
	}

	/// Row i is [g_0(x_i), ..., g_K(x_i)].
	Eigen::MatrixXd design_matrix(std::span<const double> xs) const;
	/// Sum_k coeffs[k] g_k(x).
	double evaluate(const Eigen::VectorXd &coeffs, double x) const;

	friend bool operator==(const BasisSet &, const BasisSet &) = default;

private:
	std::vector<BasisFunction> functions_;
};

enum class RegMatrix { Identity, Custom };

/// Coefficients over a basis; covers polynomial, ridge and RBF predictors.
struct LinearFit {
	BasisSet basis;
	Eigen::VectorXd coeffs;
	double reg_lambda = 0.0;
	RegMatrix reg_matrix = RegMatrix::Identity;

	double predict(double x) const {
		return basis.evaluate(coeffs, x);
	}
};

/// Relative singular-value floor below which solve_ridge reports a singular system.
inline constexpr double kRankTolerance = 1e-10;

/**
 * Minimizer of ||y - X theta||^2 + lambda^2 ||L theta||^2.
 *
 * Solved by column-pivoted Householder QR of the stacked system [X; lambda L]
 * after unit-norm column scaling. Throws SingularSystemError when the scaled
 * stacked matrix has sigma_min < kRankTolerance * sigma_max.
 * L defaults to the identity.
 */
Eigen::VectorXd solve_ridge(const Eigen::MatrixXd &X, const Eigen::VectorXd &y, double lambda,
                            const std::optional<Eigen::MatrixXd> &L = std::nullopt);

/// Least-squares polynomial of the given degree over the training times.
LinearFit fit_polynomial(const Series &train, int degree);

/// Ridge regression over an arbitrary basis, L = identity.
LinearFit fit_ridge(const Series &train, const BasisSet &basis, double lambda);

enum class CenterPlacement { EvenlySpaced, DataPoints };

struct RbfConfig {
	int n_basis = 1;
	double sigma = 1.0;
	std::vector<double> centers;
	bool include_bias = true;

	/// n centers evenly spaced over [lo, hi] inclusive (a single center sits at the midpoint).
	static RbfConfig evenly_spaced(int n, double sigma, double lo, double hi, bool bias = true);
	/// One center per training time.
	static RbfConfig at_data_points(const Series &train, double sigma, bool bias = true);
	/// Centers placed over the training times per `placement`.
	static RbfConfig for_series(const Series &train, int n, double sigma, CenterPlacement placement,
	                            bool bias = true);

	void validate() const;
};

/// Gaussian RBF network with fixed centers; weights by least squares.
LinearFit fit_rbf(const Series &train, const RbfConfig &config);

double linear_predict(const LinearFit &fit, double x);

/// Predictions at each of the given times.
std::vector<double> linear_predict(const LinearFit &fit, std::span<const double> xs);

} // namespace wxcast::linmodels
