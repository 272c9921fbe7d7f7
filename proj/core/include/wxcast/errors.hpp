#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wxcast {

/// Precondition violations on caller-supplied values.
class InvalidArgument : public std::invalid_argument {
public:
	using std::invalid_argument::invalid_argument;
};

/// Least-squares or penalized system whose numerical rank is too low to
/// give a unique solution.
class SingularSystemError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Fewer observations than free parameters.
class UnderdeterminedError : public InvalidArgument {
public:
	using InvalidArgument::InvalidArgument;
};

/// Statistic undefined because every sample has the same value.
class ZeroVarianceError : public std::domain_error {
public:
	using std::domain_error::domain_error;
};

/// Kernel weights vanish at the query point.
class NoSupportError : public std::domain_error {
public:
	using std::domain_error::domain_error;
};

/// Simulation requested from a model with an explosive AR side.
class InstabilityError : public std::domain_error {
public:
	using std::domain_error::domain_error;
};

/// Iterative estimation that ran out of budget. Carries the best point seen.
class EstimationError : public std::runtime_error {
public:
	EstimationError(const std::string &what, std::vector<double> best_params, double best_objective)
	    : std::runtime_error(what), best_params_(std::move(best_params)), best_objective_(best_objective) {
	}

	const std::vector<double> &best_params() const noexcept {
		return best_params_;
	}
	double best_objective() const noexcept {
		return best_objective_;
	}

private:
	std::vector<double> best_params_;
	double best_objective_;
};

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public std::runtime_error {
public:
	ParseError(const std::string &what, std::size_t line = 0, std::size_t column = 0)
	    : std::runtime_error(what), line_(line), column_(column) {
	}

	std::size_t line() const noexcept {
		return line_;
	}
	std::size_t column() const noexcept {
		return column_;
	}

private:
	std::size_t line_;
	std::size_t column_;
};

class IoError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Run configuration that does not match the schema.
class ConfigError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

} // namespace wxcast
