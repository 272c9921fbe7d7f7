#pragma once

#include "wxcast/series.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wxcast::nexting {

/**
 * Uniform tile coder over [0, 1] per signal.
 *
 * Tiling m is shifted by m / (M K); the tile index of v is
 * min(K - 1, floor(v K + m / M)). Feature (p, m, k) lives at index
 * (p M + m) K + k, with the bias feature (if any) last.
 */
struct TileCoder {
	std::size_t n_tilings = 8;
	std::size_t tiles_per_dim = 8;
	std::size_t n_signals = 1;
	bool include_bias = true;

	std::size_t dim() const noexcept {
		return n_tilings * tiles_per_dim * n_signals + (include_bias ? 1 : 0);
	}
	std::size_t active_count() const noexcept {
		return n_tilings * n_signals + (include_bias ? 1 : 0);
	}
	double offset(std::size_t tiling) const noexcept {
		return static_cast<double>(tiling) / static_cast<double>(n_tilings * tiles_per_dim);
	}
	void validate() const;
};

/// Sparse binary feature vector: sorted indices of the ones.
struct Features {
	std::vector<std::size_t> active;
	std::size_t dim = 0;

	double dot(std::span<const double> weights) const;
	friend bool operator==(const Features &, const Features &) = default;
};

/// Inputs must lie in [0, 1] (1e-9 slack, then clamped).
Features tile_features(std::span<const double> values, const TileCoder &coder);

struct ReturnEstimate {
	double value = 0.0;
	/// gamma^horizon * max|y| / (1 - gamma).
	double truncation_bound = 0.0;
};

/// Sum_{k < horizon} gamma^k y[t + k + 1], with t a time index of `series`.
ReturnEstimate ideal_return(const Series &series, long t, double gamma, std::size_t horizon);

enum class StepSize {
	/// alpha / (number of active features).
	PerActiveFeature,
	Raw,
};

struct NextingParams {
	/// One discount per signal, or a single value shared by all.
	std::vector<double> gamma {0.0};
	double alpha = 0.1;
	double trace_lambda = 0.9;
	StepSize step_size = StepSize::PerActiveFeature;

	void validate() const;
	double gamma_for(std::size_t signal) const;
};

/// Linear TD(lambda) predictors, one per signal, sharing a feature space.
class NextingLearner {
public:
	NextingLearner(std::size_t dim, std::size_t n_signals, NextingParams params);

	std::size_t dim() const noexcept {
		return dim_;
	}
	std::size_t n_signals() const noexcept {
		return theta_.size();
	}
	const NextingParams &params() const noexcept {
		return params_;
	}
	const std::vector<double> &theta(std::size_t signal) const {
		return theta_.at(signal);
	}
	const std::vector<double> &trace(std::size_t signal) const {
		return trace_.at(signal);
	}
	bool frozen() const noexcept {
		return frozen_;
	}
	void freeze() noexcept {
		frozen_ = true;
	}

	std::vector<double> predict(const Features &phi) const;

	/**
	 * One TD(lambda) step: e <- gamma lambda e + phi_t, then
	 * theta <- theta + alpha (y_next + gamma phi_next.theta - phi_t.theta) e.
	 * Returns phi_t.theta from before the update. No state change when frozen.
	 */
	std::vector<double> td_step(const Features &phi_t, const Features &phi_next, std::span<const double> y_next);

private:
	std::size_t dim_;
	NextingParams params_;
	std::vector<std::vector<double>> theta_;
	std::vector<std::vector<double>> trace_;
	bool frozen_ = false;
};

/// Called after step `step` (0-based) with the learner state.
using StepObserver = std::function<void(std::size_t step, const NextingLearner &)>;

/**
 * Streams equal-length signals (already scaled to [0, 1]) through a fresh
 * learner. Each signal is both input and target. Output sample t is the
 * prediction made at t for the return starting at t + 1. Updates run while
 * t + 1 exists; with `freeze_after` = k the learner is frozen after k updates.
 */
std::vector<Series> run_online(const std::vector<Series> &signals, const TileCoder &coder, const NextingParams &params,
                               std::optional<std::size_t> freeze_after = std::nullopt,
                               const StepObserver &observer = {});

struct Alignment {
	double scale = 1.0;
	double offset = 0.0;
	long shift = 0;
	double rmse = 0.0;
};

/**
 * For each shift s in 0..max_shift, fits target[k] ~ scale pred[k + s] + offset
 * by least squares over the overlap and keeps the best (smallest s on ties).
 * A constant prediction gets scale 0 and offset mean(target).
 */
Alignment align_affine(const Series &pred, const Series &target, std::size_t max_shift);

/// Applies an alignment: out[k] = scale pred[k + shift] + offset, length n - shift.
std::vector<double> apply_alignment(const Alignment &alignment, std::span<const double> pred);

} // namespace wxcast::nexting
