#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wxcast {

/**
 * Uniformly sampled scalar time series.
 *
 * Sample i sits at integer time t0 + i, so index arithmetic is time
 * arithmetic. Hour-of-day series from the weather fixtures use t0 = 1.
 */
struct Series {
	std::vector<double> values;
	long t0 = 1;
	std::optional<int> period_hint;
	std::string unit;

	Series() = default;
	explicit Series(std::vector<double> v, long first = 1, std::optional<int> period = std::nullopt,
	                std::string unit_label = {})
	    : values(std::move(v)), t0(first), period_hint(period), unit(std::move(unit_label)) {
	}

	std::size_t size() const noexcept {
		return values.size();
	}
	bool empty() const noexcept {
		return values.empty();
	}
	/// Time index of the last sample.
	long t_end() const noexcept {
		return t0 + static_cast<long>(values.size()) - 1;
	}
	bool contains_time(long t) const noexcept {
		return !values.empty() && t >= t0 && t <= t_end();
	}
	/// Value at time index t. Throws InvalidArgument when t is outside the series.
	double at_time(long t) const;
	/// Sample times t0, t0+1, ... as reals.
	std::vector<double> times() const;
	std::span<const double> view() const noexcept {
		return values;
	}

	/// Copy of samples [offset, offset+count) keeping metadata; t0 advances by offset.
	Series slice(std::size_t offset, std::size_t count) const;

	friend bool operator==(const Series &, const Series &) = default;
};

/// A series cut into a training window followed by a holdout window.
struct Split {
	Series train;
	Series holdout;

	std::size_t D() const noexcept {
		return train.size();
	}
	std::size_t F() const noexcept {
		return holdout.size();
	}
	/// Reassembles the source series.
	Series joined() const;
};

/// Closed interval used to map raw values into [0, 1].
struct UnitRange {
	double lo = 0.0;
	double hi = 1.0;

	double to_unit(double v) const noexcept;
	double from_unit(double u) const noexcept {
		return lo + u * (hi - lo);
	}
};

/// amplitude * sin(2 pi t / period + phase) sampled at t = 1..count.
Series make_sine(double amplitude, double period, long count, double phase = 0.0);

/// First D samples train, the rest hold out. Requires 1 <= D < size.
Split split(const Series &series, std::size_t D);

/// Maps each value to clamp((v - lo) / (hi - lo), 0, 1). Requires hi > lo.
Series normalize_unit(const Series &series, double lo, double hi);

/// Range spanned by the samples. Throws on an empty series.
UnitRange value_range(const Series &series);

double mean(std::span<const double> values);
/// Population variance (divides by n).
double population_variance(std::span<const double> values);

} // namespace wxcast
