#include "wxcast/series.hpp"

#include "wxcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace wxcast {

double Series::at_time(long t) const {
	if (!contains_time(t)) {
		throw InvalidArgument("time index " + std::to_string(t) + " outside series [" + std::to_string(t0) + ", " +
		                      std::to_string(t_end()) + "]");
	}
	return values[static_cast<std::size_t>(t - t0)];
}

std::vector<double> Series::times() const {
	std::vector<double> t(values.size());
	for (std::size_t i = 0; i < t.size(); ++i) {
		t[i] = static_cast<double>(t0 + static_cast<long>(i));
	}
	return t;
}

Series Series::slice(std::size_t offset, std::size_t count) const {
	if (offset + count > values.size()) {
		throw InvalidArgument("slice [" + std::to_string(offset) + ", " + std::to_string(offset + count) +
		                      ") exceeds series length " + std::to_string(values.size()));
	}
	Series out(std::vector<double>(values.begin() + static_cast<std::ptrdiff_t>(offset),
	                               values.begin() + static_cast<std::ptrdiff_t>(offset + count)),
	           t0 + static_cast<long>(offset), period_hint, unit);
	return out;
}

Series Split::joined() const {
	Series out = train;
	out.values.insert(out.values.end(), holdout.values.begin(), holdout.values.end());
	return out;
}

double UnitRange::to_unit(double v) const noexcept {
	return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

Series make_sine(double amplitude, double period, long count, double phase) {
	if (!(period > 0.0)) {
		throw InvalidArgument("make_sine: period must be positive");
	}
	if (count < 1) {
		throw InvalidArgument("make_sine: count must be at least 1");
	}
	Series s;
	s.t0 = 1;
	s.values.resize(static_cast<std::size_t>(count));
	const double omega = 2.0 * std::numbers::pi / period;
	for (long i = 0; i < count; ++i) {
		s.values[static_cast<std::size_t>(i)] = amplitude * std::sin(omega * static_cast<double>(s.t0 + i) + phase);
	}
	return s;
}

Split split(const Series &series, std::size_t D) {
	if (D < 1 || D >= series.size()) {
		throw InvalidArgument("split: D = " + std::to_string(D) + " must satisfy 1 <= D < " +
		                      std::to_string(series.size()));
	}
	return Split {series.slice(0, D), series.slice(D, series.size() - D)};
}

Series normalize_unit(const Series &series, double lo, double hi) {
	if (!(hi > lo)) {
		throw InvalidArgument("normalize_unit: hi must exceed lo");
	}
	const UnitRange range {lo, hi};
	Series out = series;
	for (double &v : out.values) {
		v = range.to_unit(v);
	}
	return out;
}

UnitRange value_range(const Series &series) {
	if (series.empty()) {
		throw InvalidArgument("value_range: empty series");
	}
	const auto [lo, hi] = std::minmax_element(series.values.begin(), series.values.end());
	return UnitRange {*lo, *hi};
}

double mean(std::span<const double> values) {
	if (values.empty()) {
		throw InvalidArgument("mean of empty sequence");
	}
	return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double population_variance(std::span<const double> values) {
	const double m = mean(values);
	double ss = 0.0;
	for (double v : values) {
		ss += (v - m) * (v - m);
	}
	return ss / static_cast<double>(values.size());
}

} // namespace wxcast
