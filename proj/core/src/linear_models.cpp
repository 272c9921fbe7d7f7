#include "wxcast/linear_models.hpp"

#include "wxcast/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace wxcast::linmodels {

BasisFunction BasisFunction::constant() {
	return BasisFunction {};
}

BasisFunction BasisFunction::monomial(int degree) {
	if (degree < 0) {
		throw InvalidArgument("monomial degree must be nonnegative");
	}
	BasisFunction g;
	g.kind = BasisKind::Monomial;
	g.degree = degree;
	return g;
}

BasisFunction BasisFunction::sinusoid(double period, double phase) {
	if (!(period > 0.0)) {
		throw InvalidArgument("sinusoid period must be positive");
	}
	BasisFunction g;
	g.kind = BasisKind::Sinusoid;
	g.period = period;
	g.phase = phase;
	return g;
}

BasisFunction BasisFunction::gaussian(double center, double sigma) {
	if (!(sigma > 0.0)) {
		throw InvalidArgument("gaussian width must be positive");
	}
	BasisFunction g;
	g.kind = BasisKind::Gaussian;
	g.center = center;
	g.sigma = sigma;
	return g;
}

double BasisFunction::operator()(double x) const noexcept {
	switch (kind) {
	case BasisKind::Constant:
		return 1.0;
	case BasisKind::Monomial: {
		double r = 1.0;
		for (int i = 0; i < degree; ++i) {
			r *= x;
		}
		return r;
	}
	case BasisKind::Sinusoid:
		return std::cos(2.0 * std::numbers::pi * x / period + phase);
	case BasisKind::Gaussian: {
		const double d = x - center;
		return std::exp(-d * d / (2.0 * sigma * sigma));
	}
	}
	return 0.0;
}

std::string BasisFunction::name() const {
	std::ostringstream os;
	switch (kind) {
	case BasisKind::Constant:
		os << "1";
		break;
	case BasisKind::Monomial:
		os << "x^" << degree;
		break;
	case BasisKind::Sinusoid:
		os << "cos(2pi x/" << period << " + " << phase << ")";
		break;
	case BasisKind::Gaussian:
		os << "gauss(c=" << center << ", s=" << sigma << ")";
		break;
	}
	return os.str();
}

BasisSet::BasisSet(std::vector<BasisFunction> functions) : functions_(std::move(functions)) {
	if (functions_.empty()) {
		throw InvalidArgument("basis set must not be empty");
	}
}

BasisSet BasisSet::polynomial(int degree) {
	if (degree < 0) {
		throw InvalidArgument("polynomial degree must be nonnegative");
	}
	std::vector<BasisFunction> fs;
	fs.reserve(static_cast<std::size_t>(degree) + 1);
	for (int l = 0; l <= degree; ++l) {
		fs.push_back(BasisFunction::monomial(l));
	}
	return BasisSet(std::move(fs));
}

Eigen::MatrixXd BasisSet::design_matrix(std::span<const double> xs) const {
	Eigen::MatrixXd X(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(functions_.size()));
	for (std::size_t i = 0; i < xs.size(); ++i) {
		for (std::size_t k = 0; k < functions_.size(); ++k) {
			X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = functions_[k](xs[i]);
		}
	}
	return X;
}

double BasisSet::evaluate(const Eigen::VectorXd &coeffs, double x) const {
	double acc = 0.0;
	for (std::size_t k = 0; k < functions_.size(); ++k) {
		acc += coeffs[static_cast<Eigen::Index>(k)] * functions_[k](x);
	}
	return acc;
}

Eigen::VectorXd solve_ridge(const Eigen::MatrixXd &X, const Eigen::VectorXd &y, double lambda,
                            const std::optional<Eigen::MatrixXd> &L) {
	const Eigen::Index rows = X.rows();
	const Eigen::Index cols = X.cols();
	if (rows != y.size()) {
		throw InvalidArgument("solve_ridge: design matrix has " + std::to_string(rows) + " rows but y has " +
		                      std::to_string(y.size()) + " entries");
	}
	if (cols == 0) {
		throw InvalidArgument("solve_ridge: design matrix has no columns");
	}
	if (!(lambda >= 0.0)) {
		throw InvalidArgument("solve_ridge: lambda must be nonnegative");
	}
	if (L && L->cols() != cols) {
		throw InvalidArgument("solve_ridge: regularization matrix column count differs from X");
	}

	const bool regularized = lambda > 0.0;
	const Eigen::Index reg_rows = regularized ? (L ? L->rows() : cols) : 0;

	Eigen::MatrixXd A(rows + reg_rows, cols);
	A.topRows(rows) = X;
	if (regularized) {
		if (L) {
			A.bottomRows(reg_rows) = lambda * *L;
		} else {
			A.bottomRows(reg_rows) = lambda * Eigen::MatrixXd::Identity(cols, cols);
		}
	}
	Eigen::VectorXd b = Eigen::VectorXd::Zero(rows + reg_rows);
	b.head(rows) = y;

	// Equilibrate columns; raw monomials on hour indices span many decades.
	Eigen::VectorXd scale(cols);
	for (Eigen::Index k = 0; k < cols; ++k) {
		const double n = A.col(k).norm();
		scale[k] = n > 0.0 ? 1.0 / n : 1.0;
	}
	A = A * scale.asDiagonal();

	const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
	const auto &sv = svd.singularValues();
	const double smax = sv.size() ? sv[0] : 0.0;
	const double smin = sv.size() ? sv[sv.size() - 1] : 0.0;
	if (rows + reg_rows < cols || !(smax > 0.0) || smin < kRankTolerance * smax) {
		std::ostringstream os;
		os << "solve_ridge: rank-deficient system (" << rows << "x" << cols << ", lambda=" << lambda
		   << ", sigma_min/sigma_max=" << (smax > 0.0 ? smin / smax : 0.0) << ")";
		throw SingularSystemError(os.str());
	}

	const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
	const Eigen::VectorXd z = qr.solve(b);
	return scale.asDiagonal() * z;
}

namespace {

Eigen::VectorXd to_vector(const Series &s) {
	return Eigen::Map<const Eigen::VectorXd>(s.values.data(), static_cast<Eigen::Index>(s.values.size()));
}

} // namespace

LinearFit fit_ridge(const Series &train, const BasisSet &basis, double lambda) {
	if (train.empty()) {
		throw InvalidArgument("fit_ridge: empty training series");
	}
	const auto xs = train.times();
	const Eigen::MatrixXd X = basis.design_matrix(xs);
	return LinearFit {basis, solve_ridge(X, to_vector(train), lambda), lambda, RegMatrix::Identity};
}

LinearFit fit_polynomial(const Series &train, int degree) {
	if (degree < 0) {
		throw InvalidArgument("fit_polynomial: degree must be nonnegative");
	}
	if (train.size() < static_cast<std::size_t>(degree) + 1) {
		throw UnderdeterminedError("fit_polynomial: degree " + std::to_string(degree) + " needs at least " +
		                           std::to_string(degree + 1) + " samples, got " + std::to_string(train.size()));
	}
	return fit_ridge(train, BasisSet::polynomial(degree), 0.0);
}

RbfConfig RbfConfig::evenly_spaced(int n, double sigma, double lo, double hi, bool bias) {
	if (n < 1) {
		throw InvalidArgument("RBF network needs at least one basis function");
	}
	RbfConfig c;
	c.n_basis = n;
	c.sigma = sigma;
	c.include_bias = bias;
	c.centers.resize(static_cast<std::size_t>(n));
	if (n == 1) {
		c.centers[0] = 0.5 * (lo + hi);
	} else {
		for (int i = 0; i < n; ++i) {
			c.centers[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
		}
	}
	return c;
}

RbfConfig RbfConfig::at_data_points(const Series &train, double sigma, bool bias) {
	RbfConfig c;
	c.centers = train.times();
	c.n_basis = static_cast<int>(c.centers.size());
	c.sigma = sigma;
	c.include_bias = bias;
	return c;
}

RbfConfig RbfConfig::for_series(const Series &train, int n, double sigma, CenterPlacement placement, bool bias) {
	if (train.empty()) {
		throw InvalidArgument("RBF placement over an empty series");
	}
	if (placement == CenterPlacement::DataPoints) {
		return at_data_points(train, sigma, bias);
	}
	return evenly_spaced(n, sigma, static_cast<double>(train.t0), static_cast<double>(train.t_end()), bias);
}

void RbfConfig::validate() const {
	if (n_basis < 1) {
		throw InvalidArgument("RBF network needs at least one basis function");
	}
	if (!(sigma > 0.0)) {
		throw InvalidArgument("RBF width sigma must be positive");
	}
	if (centers.size() != static_cast<std::size_t>(n_basis)) {
		throw InvalidArgument("RBF config lists " + std::to_string(centers.size()) + " centers for N = " +
		                      std::to_string(n_basis));
	}
}

LinearFit fit_rbf(const Series &train, const RbfConfig &config) {
	config.validate();
	const std::size_t needed = static_cast<std::size_t>(config.n_basis) + (config.include_bias ? 1 : 0);
	if (train.size() < needed) {
		throw UnderdeterminedError("fit_rbf: " + std::to_string(needed) + " weights need at least that many samples, got " +
		                           std::to_string(train.size()));
	}
	std::vector<BasisFunction> fs;
	if (config.include_bias) {
		fs.push_back(BasisFunction::constant());
	}
	for (double c : config.centers) {
		fs.push_back(BasisFunction::gaussian(c, config.sigma));
	}
	try {
		return fit_ridge(train, BasisSet(std::move(fs)), 0.0);
	} catch (const SingularSystemError &e) {
		std::ostringstream os;
		os << "fit_rbf: N=" << config.n_basis << ", sigma=" << config.sigma << ", centers=[";
		for (std::size_t i = 0; i < config.centers.size(); ++i) {
			os << (i ? ", " : "") << config.centers[i];
		}
		os << "]: " << e.what();
		throw SingularSystemError(os.str());
	}
}

double linear_predict(const LinearFit &fit, double x) {
	return fit.predict(x);
}

std::vector<double> linear_predict(const LinearFit &fit, std::span<const double> xs) {
	std::vector<double> out(xs.size());
	for (std::size_t i = 0; i < xs.size(); ++i) {
		out[i] = fit.predict(xs[i]);
	}
	return out;
}

} // namespace wxcast::linmodels
