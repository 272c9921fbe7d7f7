#include "wxcast/nexting.hpp"

#include "wxcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace wxcast::nexting {

void TileCoder::validate() const {
	if (n_tilings == 0 || tiles_per_dim == 0 || n_signals == 0) {
		throw InvalidArgument("tile coder needs at least one tiling, tile and signal");
	}
}

double Features::dot(std::span<const double> weights) const {
	double s = 0.0;
	for (std::size_t i : active) {
		s += weights[i];
	}
	return s;
}

Features tile_features(std::span<const double> values, const TileCoder &coder) {
	coder.validate();
	if (values.size() != coder.n_signals) {
		throw InvalidArgument("tile_features: expected " + std::to_string(coder.n_signals) + " values, got " +
		                      std::to_string(values.size()));
	}
	Features f;
	f.dim = coder.dim();
	f.active.reserve(coder.active_count());
	const auto M = static_cast<double>(coder.n_tilings);
	const auto K = static_cast<double>(coder.tiles_per_dim);
	for (std::size_t p = 0; p < values.size(); ++p) {
		const double raw = values[p];
		if (!(raw >= -1e-9 && raw <= 1.0 + 1e-9)) {
			std::ostringstream os;
			os << "tile_features: signal " << p << " value " << raw << " outside [0, 1]";
			throw InvalidArgument(os.str());
		}
		const double v = std::clamp(raw, 0.0, 1.0);
		for (std::size_t m = 0; m < coder.n_tilings; ++m) {
			const double pos = std::floor(v * K + static_cast<double>(m) / M);
			const auto k = std::min(coder.tiles_per_dim - 1, static_cast<std::size_t>(pos));
			f.active.push_back((p * coder.n_tilings + m) * coder.tiles_per_dim + k);
		}
	}
	if (coder.include_bias) {
		f.active.push_back(f.dim - 1);
	}
	return f;
}

ReturnEstimate ideal_return(const Series &series, long t, double gamma, std::size_t horizon) {
	if (!(gamma >= 0.0 && gamma < 1.0)) {
		throw InvalidArgument("ideal_return: gamma must lie in [0, 1)");
	}
	if (horizon == 0) {
		throw InvalidArgument("ideal_return: horizon must be positive");
	}
	if (!series.contains_time(t) || t + static_cast<long>(horizon) > series.t_end()) {
		throw InvalidArgument("ideal_return: need samples up to t=" + std::to_string(t + static_cast<long>(horizon)) +
		                      ", series ends at t=" + std::to_string(series.t_end()));
	}
	ReturnEstimate r;
	double w = 1.0;
	for (std::size_t k = 0; k < horizon; ++k) {
		r.value += w * series.at_time(t + static_cast<long>(k) + 1);
		w *= gamma;
	}
	double ymax = 0.0;
	for (double v : series.values) {
		ymax = std::max(ymax, std::abs(v));
	}
	r.truncation_bound = std::pow(gamma, static_cast<double>(horizon)) * ymax / (1.0 - gamma);
	return r;
}

void NextingParams::validate() const {
	if (gamma.empty()) {
		throw InvalidArgument("nexting: at least one discount rate required");
	}
	for (double g : gamma) {
		if (!(g >= 0.0 && g < 1.0)) {
			throw InvalidArgument("nexting: gamma must lie in [0, 1)");
		}
	}
	if (!(alpha > 0.0) || !std::isfinite(alpha)) {
		throw InvalidArgument("nexting: alpha must be positive");
	}
	if (!(trace_lambda >= 0.0 && trace_lambda <= 1.0)) {
		throw InvalidArgument("nexting: trace lambda must lie in [0, 1]");
	}
}

double NextingParams::gamma_for(std::size_t signal) const {
	return gamma.size() == 1 ? gamma[0] : gamma.at(signal);
}

NextingLearner::NextingLearner(std::size_t dim, std::size_t n_signals, NextingParams params)
    : dim_(dim), params_(std::move(params)) {
	params_.validate();
	if (dim == 0 || n_signals == 0) {
		throw InvalidArgument("nexting learner needs a nonempty feature space and at least one signal");
	}
	if (params_.gamma.size() != 1 && params_.gamma.size() != n_signals) {
		throw InvalidArgument("nexting: " + std::to_string(params_.gamma.size()) + " discount rates for " +
		                      std::to_string(n_signals) + " signals");
	}
	theta_.assign(n_signals, std::vector<double>(dim, 0.0));
	trace_.assign(n_signals, std::vector<double>(dim, 0.0));
}

std::vector<double> NextingLearner::predict(const Features &phi) const {
	if (phi.dim != dim_) {
		throw InvalidArgument("nexting: feature dimension " + std::to_string(phi.dim) + " does not match learner " +
		                      std::to_string(dim_));
	}
	std::vector<double> out(theta_.size());
	for (std::size_t i = 0; i < theta_.size(); ++i) {
		out[i] = phi.dot(theta_[i]);
	}
	return out;
}

std::vector<double> NextingLearner::td_step(const Features &phi_t, const Features &phi_next,
                                            std::span<const double> y_next) {
	std::vector<double> pred = predict(phi_t);
	if (phi_next.dim != dim_) {
		throw InvalidArgument("nexting: next-step feature dimension does not match learner");
	}
	if (y_next.size() != theta_.size()) {
		throw InvalidArgument("nexting: expected " + std::to_string(theta_.size()) + " targets, got " +
		                      std::to_string(y_next.size()));
	}
	if (frozen_) {
		return pred;
	}
	double alpha = params_.alpha;
	if (params_.step_size == StepSize::PerActiveFeature && !phi_t.active.empty()) {
		alpha /= static_cast<double>(phi_t.active.size());
	}
	for (std::size_t i = 0; i < theta_.size(); ++i) {
		const double gamma = params_.gamma_for(i);
		auto &theta = theta_[i];
		auto &e = trace_[i];
		const double delta = y_next[i] + gamma * phi_next.dot(theta) - pred[i];
		const double decay = gamma * params_.trace_lambda;
		if (decay == 0.0) {
			std::fill(e.begin(), e.end(), 0.0);
		} else {
			for (double &v : e) {
				v *= decay;
			}
		}
		for (std::size_t k : phi_t.active) {
			e[k] += 1.0;
		}
		const double step = alpha * delta;
		for (std::size_t k = 0; k < dim_; ++k) {
			theta[k] += step * e[k];
		}
	}
	return pred;
}

std::vector<Series> run_online(const std::vector<Series> &signals, const TileCoder &coder, const NextingParams &params,
                               std::optional<std::size_t> freeze_after, const StepObserver &observer) {
	if (signals.empty()) {
		throw InvalidArgument("run_online: no signals");
	}
	const std::size_t n = signals.front().size();
	for (const Series &s : signals) {
		if (s.size() != n) {
			throw InvalidArgument("run_online: signal lengths differ (" + std::to_string(n) + " vs " +
			                      std::to_string(s.size()) + ")");
		}
	}
	if (n == 0) {
		throw InvalidArgument("run_online: empty signals");
	}
	TileCoder tc = coder;
	tc.n_signals = signals.size();
	NextingLearner learner(tc.dim(), signals.size(), params);

	auto sample = [&](std::size_t t) {
		std::vector<double> v(signals.size());
		for (std::size_t p = 0; p < signals.size(); ++p) {
			v[p] = signals[p].values[t];
		}
		return v;
	};

	std::vector<Series> out;
	for (const Series &s : signals) {
		Series o;
		o.t0 = s.t0;
		o.period_hint = s.period_hint;
		o.values.resize(n);
		out.push_back(std::move(o));
	}

	if (freeze_after && *freeze_after == 0) {
		learner.freeze();
	}
	Features phi = tile_features(sample(0), tc);
	for (std::size_t t = 0; t < n; ++t) {
		std::vector<double> pred;
		if (t + 1 < n) {
			const std::vector<double> y_next = sample(t + 1);
			Features phi_next = tile_features(y_next, tc);
			pred = learner.td_step(phi, phi_next, y_next);
			phi = std::move(phi_next);
			if (freeze_after && t + 1 == *freeze_after) {
				learner.freeze();
			}
		} else {
			pred = learner.predict(phi);
		}
		for (std::size_t p = 0; p < signals.size(); ++p) {
			out[p].values[t] = pred[p];
		}
		if (observer) {
			observer(t, learner);
		}
	}
	return out;
}

Alignment align_affine(const Series &pred, const Series &target, std::size_t max_shift) {
	const std::size_t n = pred.size();
	if (target.size() != n) {
		throw InvalidArgument("align_affine: prediction and target lengths differ");
	}
	if (max_shift >= n) {
		throw InvalidArgument("align_affine: shift " + std::to_string(max_shift) + " leaves no overlap for length " +
		                      std::to_string(n));
	}
	std::optional<Alignment> best;
	for (std::size_t s = 0; s <= max_shift; ++s) {
		const std::size_t m = n - s;
		const std::span<const double> p(pred.values.data() + s, m);
		const std::span<const double> y(target.values.data(), m);
		const double pm = mean(p);
		const double ym = mean(y);
		double spp = 0.0;
		double spy = 0.0;
		for (std::size_t k = 0; k < m; ++k) {
			spp += (p[k] - pm) * (p[k] - pm);
			spy += (p[k] - pm) * (y[k] - ym);
		}
		Alignment a;
		a.shift = static_cast<long>(s);
		double scale_ref = 0.0;
		for (double v : p) {
			scale_ref = std::max(scale_ref, std::abs(v));
		}
		if (spp <= 1e-24 * (1.0 + scale_ref * scale_ref) * static_cast<double>(m)) {
			a.scale = 0.0;
			a.offset = ym;
		} else {
			a.scale = spy / spp;
			a.offset = ym - a.scale * pm;
		}
		double sse = 0.0;
		for (std::size_t k = 0; k < m; ++k) {
			const double r = y[k] - (a.scale * p[k] + a.offset);
			sse += r * r;
		}
		a.rmse = std::sqrt(sse / static_cast<double>(m));
		if (!best || a.rmse < best->rmse) {
			best = a;
		}
	}
	return *best;
}

std::vector<double> apply_alignment(const Alignment &alignment, std::span<const double> pred) {
	const auto s = static_cast<std::size_t>(std::max(0L, alignment.shift));
	std::vector<double> out;
	for (std::size_t k = s; k < pred.size(); ++k) {
		out.push_back(alignment.scale * pred[k] + alignment.offset);
	}
	return out;
}

} // namespace wxcast::nexting
