#pragma once

#include "wxcast/series.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace wxcast::tree {

/// Row-major training table: `n_features` inputs per row plus a target.
struct Table {
	std::size_t n_features = 1;
	std::vector<double> x;
	std::vector<double> y;

	std::size_t rows() const noexcept {
		return y.size();
	}
	double at(std::size_t row, std::size_t feature) const noexcept {
		return x[row * n_features + feature];
	}
	std::span<const double> row(std::size_t r) const noexcept {
		return {x.data() + r * n_features, n_features};
	}
	void validate() const;

	/// One feature per row: the sample time.
	static Table from_series(const Series &series);
};

struct SplitChoice {
	std::size_t feature = 0;
	double threshold = 0.0;
	double left_cost = 0.0;
	double right_cost = 0.0;

	double cost() const noexcept {
		return left_cost + right_cost;
	}
};

/**
 * Exhaustive search over features and midpoints between consecutive distinct
 * values for the split minimizing the summed within-half SSE. Ties go to the
 * lower feature, then the lower threshold. Returns nullopt when no feature
 * takes two distinct values or no split lowers the error.
 */
std::optional<SplitChoice> best_split(const Table &table);

struct GrowConfig {
	/// Minimum observations in each child.
	std::size_t min_node_size = 1;
	/// Nodes with fewer observations are not split.
	std::size_t min_parent_size = 2;
	std::size_t max_leaves = std::numeric_limits<std::size_t>::max();

	void validate() const;
};

struct Node {
	bool leaf = true;
	std::size_t feature = 0;
	double threshold = 0.0;
	int left = -1;
	int right = -1;
	/// Mean of the targets routed here.
	double value = 0.0;
	std::size_t count = 0;
	/// Sum of squared deviations from `value`.
	double sse = 0.0;
};

/// Binary regression tree; node 0 is the root.
class Tree {
public:
	Tree() = default;
	explicit Tree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
	}

	double predict(std::span<const double> x) const;
	double predict(double x) const {
		return predict(std::span<const double>(&x, 1));
	}
	/// Index of the leaf that `x` lands in.
	int leaf_of(std::span<const double> x) const;

	const std::vector<Node> &nodes() const noexcept {
		return nodes_;
	}
	std::size_t leaf_count() const;
	/// Sum of leaf SSE (training error of the tree).
	double training_sse() const;
	/// Reachable leaves in left-to-right order.
	std::vector<int> leaves() const;
	/// Internal node indices that are reachable from the root.
	std::vector<int> internal_nodes() const;
	/// C_alpha = sum of leaf SSE + alpha * leaf count.
	double cost_complexity(double alpha) const;

	/// Copy with the subtree at `node` collapsed into a leaf.
	Tree collapsed(int node) const;
	/// Compact copy with unreachable nodes removed.
	Tree compacted() const;

private:
	std::vector<Node> nodes_;
};

/// Greedy best-first growth: always split the leaf with the largest SSE reduction.
Tree grow(const Table &table, const GrowConfig &config);
Tree grow(const Series &series, const GrowConfig &config);

/// Weakest-link cost-complexity pruning to the minimizer of C_alpha.
Tree prune(const Tree &tree, double alpha);

class BagEnsemble {
public:
	BagEnsemble(std::vector<Tree> trees, std::vector<std::uint64_t> seeds);

	double predict(std::span<const double> x) const;
	double predict(double x) const {
		return predict(std::span<const double>(&x, 1));
	}
	const std::vector<Tree> &trees() const noexcept {
		return trees_;
	}
	const std::vector<std::uint64_t> &seeds() const noexcept {
		return seeds_;
	}
	std::size_t size() const noexcept {
		return trees_.size();
	}

private:
	std::vector<Tree> trees_;
	std::vector<std::uint64_t> seeds_;
};

/// Per-member seed derived from the ensemble seed and member index.
std::uint64_t member_seed(std::uint64_t seed, std::size_t b);

/// B trees, each grown on a bootstrap resample of D rows. With `resample`
/// false every member sees the original table.
BagEnsemble bag_fit(const Table &table, std::size_t B, const GrowConfig &config, std::uint64_t seed,
                    bool resample = true);

/// Evaluates an inner predictor at ((t - t0) mod period) + t0.
struct PeriodicWrapper {
	std::function<double(double)> inner;
	long period = 24;
	long t0 = 1;

	long base_time(long t) const;
};

double periodic_predict(const PeriodicWrapper &wrapper, long t);

enum class MultiPeriodMode {
	/// One tree over all periods, phase as the input.
	Pooled,
	/// One tree per period, predictions averaged.
	Averaged,
};

/**
 * Prototype for one period learned from the `n_periods` periods of `series`
 * that end at its last sample. The returned wrapper maps any time into the
 * first period before evaluating.
 */
PeriodicWrapper fit_prototype(const Series &series, long period, std::size_t n_periods, const GrowConfig &config,
                              MultiPeriodMode mode = MultiPeriodMode::Averaged, double prune_alpha = 0.0);

} // namespace wxcast::tree
