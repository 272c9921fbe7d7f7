#include "wxcast/tree.hpp"

#include "wxcast/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace wxcast::tree {

void Table::validate() const {
	if (n_features == 0) {
		throw InvalidArgument("tree table needs at least one feature");
	}
	if (x.size() != y.size() * n_features) {
		throw InvalidArgument("tree table: feature matrix has " + std::to_string(x.size()) + " entries for " +
		                      std::to_string(y.size()) + " rows of " + std::to_string(n_features));
	}
}

Table Table::from_series(const Series &series) {
	Table t;
	t.n_features = 1;
	t.x = series.times();
	t.y = series.values;
	return t;
}

void GrowConfig::validate() const {
	if (min_node_size < 1) {
		throw InvalidArgument("min_node_size must be at least 1");
	}
	if (max_leaves < 1) {
		throw InvalidArgument("max_leaves must be at least 1");
	}
}

namespace {

// Running mean / sum of squared deviations (Welford).
struct Moments {
	double n = 0.0;
	double mean = 0.0;
	double m2 = 0.0;

	void add(double v) {
		n += 1.0;
		const double d = v - mean;
		mean += d / n;
		m2 += d * (v - mean);
	}
};

double sse_of(const Table &table, std::span<const std::size_t> rows, double &mean_out) {
	double s = 0.0;
	for (std::size_t r : rows) {
		s += table.y[r];
	}
	const double m = rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
	double ss = 0.0;
	for (std::size_t r : rows) {
		ss += (table.y[r] - m) * (table.y[r] - m);
	}
	mean_out = m;
	return ss;
}

bool better(double cost, std::size_t feature, double threshold, const std::optional<SplitChoice> &incumbent,
            double scale) {
	if (!incumbent) {
		return true;
	}
	const double tol = 1e-12 * (1.0 + scale);
	if (cost < incumbent->cost() - tol) {
		return true;
	}
	if (cost > incumbent->cost() + tol) {
		return false;
	}
	return feature < incumbent->feature || (feature == incumbent->feature && threshold < incumbent->threshold);
}

std::optional<SplitChoice> best_split_rows(const Table &table, std::span<const std::size_t> rows,
                                           std::size_t min_node) {
	const std::size_t n = rows.size();
	if (n < 2) {
		return std::nullopt;
	}
	double parent_mean = 0.0;
	const double parent_sse = sse_of(table, rows, parent_mean);

	std::optional<SplitChoice> best;
	std::vector<std::size_t> order(rows.begin(), rows.end());
	std::vector<double> prefix(n), suffix(n);
	for (std::size_t j = 0; j < table.n_features; ++j) {
		std::stable_sort(order.begin(), order.end(),
		                 [&](std::size_t a, std::size_t b) { return table.at(a, j) < table.at(b, j); });
		Moments fwd;
		for (std::size_t i = 0; i < n; ++i) {
			fwd.add(table.y[order[i]]);
			prefix[i] = fwd.m2;
		}
		Moments bwd;
		for (std::size_t i = n; i-- > 0;) {
			bwd.add(table.y[order[i]]);
			suffix[i] = bwd.m2;
		}
		// Split between positions i-1 and i.
		for (std::size_t i = 1; i < n; ++i) {
			const double lo = table.at(order[i - 1], j);
			const double hi = table.at(order[i], j);
			if (!(hi > lo) || i < min_node || n - i < min_node) {
				continue;
			}
			const double s = 0.5 * (lo + hi);
			const double cost = prefix[i - 1] + suffix[i];
			if (better(cost, j, s, best, parent_sse)) {
				best = SplitChoice {j, s, prefix[i - 1], suffix[i]};
			}
		}
	}
	// A split that does not lower the error is no split.
	if (best && !(best->cost() < parent_sse - 1e-12 * (1.0 + parent_sse))) {
		return std::nullopt;
	}
	return best;
}

} // namespace

std::optional<SplitChoice> best_split(const Table &table) {
	table.validate();
	if (table.rows() == 0) {
		throw InvalidArgument("best_split: empty input");
	}
	std::vector<std::size_t> rows(table.rows());
	std::iota(rows.begin(), rows.end(), std::size_t {0});
	return best_split_rows(table, rows, 1);
}

double Tree::predict(std::span<const double> x) const {
	return nodes_.at(static_cast<std::size_t>(leaf_of(x))).value;
}

int Tree::leaf_of(std::span<const double> x) const {
	if (nodes_.empty()) {
		throw InvalidArgument("predict on an empty tree");
	}
	int k = 0;
	while (!nodes_[static_cast<std::size_t>(k)].leaf) {
		const Node &n = nodes_[static_cast<std::size_t>(k)];
		if (n.feature >= x.size()) {
			throw InvalidArgument("tree input has " + std::to_string(x.size()) + " features, split uses feature " +
			                      std::to_string(n.feature));
		}
		k = x[n.feature] <= n.threshold ? n.left : n.right;
	}
	return k;
}

std::vector<int> Tree::leaves() const {
	std::vector<int> out;
	if (nodes_.empty()) {
		return out;
	}
	std::vector<int> stack {0};
	while (!stack.empty()) {
		const int k = stack.back();
		stack.pop_back();
		const Node &n = nodes_[static_cast<std::size_t>(k)];
		if (n.leaf) {
			out.push_back(k);
		} else {
			stack.push_back(n.right);
			stack.push_back(n.left);
		}
	}
	return out;
}

std::vector<int> Tree::internal_nodes() const {
	std::vector<int> out;
	if (nodes_.empty()) {
		return out;
	}
	std::vector<int> stack {0};
	while (!stack.empty()) {
		const int k = stack.back();
		stack.pop_back();
		const Node &n = nodes_[static_cast<std::size_t>(k)];
		if (!n.leaf) {
			out.push_back(k);
			stack.push_back(n.right);
			stack.push_back(n.left);
		}
	}
	return out;
}

std::size_t Tree::leaf_count() const {
	return leaves().size();
}

double Tree::training_sse() const {
	double s = 0.0;
	for (int k : leaves()) {
		s += nodes_[static_cast<std::size_t>(k)].sse;
	}
	return s;
}

double Tree::cost_complexity(double alpha) const {
	return training_sse() + alpha * static_cast<double>(leaf_count());
}

Tree Tree::collapsed(int node) const {
	std::vector<Node> copy = nodes_;
	Node &n = copy.at(static_cast<std::size_t>(node));
	n.leaf = true;
	return Tree(std::move(copy)).compacted();
}

Tree Tree::compacted() const {
	if (nodes_.empty()) {
		return *this;
	}
	std::vector<Node> out;
	// Breadth-first copy keeps parents ahead of children.
	std::vector<std::pair<int, int>> queue {{0, -1}};
	std::vector<int> remap(nodes_.size(), -1);
	for (std::size_t head = 0; head < queue.size(); ++head) {
		const int old = queue[head].first;
		remap[static_cast<std::size_t>(old)] = static_cast<int>(out.size());
		Node n = nodes_[static_cast<std::size_t>(old)];
		if (n.leaf) {
			n.left = n.right = -1;
			n.feature = 0;
			n.threshold = 0.0;
		} else {
			queue.push_back({n.left, 0});
			queue.push_back({n.right, 0});
		}
		out.push_back(n);
	}
	for (Node &n : out) {
		if (!n.leaf) {
			n.left = remap[static_cast<std::size_t>(n.left)];
			n.right = remap[static_cast<std::size_t>(n.right)];
		}
	}
	return Tree(std::move(out));
}

Tree grow(const Table &table, const GrowConfig &config) {
	table.validate();
	config.validate();
	if (table.rows() == 0) {
		throw InvalidArgument("grow: empty training table");
	}

	std::vector<Node> nodes(1);
	std::vector<std::vector<std::size_t>> members(1);
	members[0].resize(table.rows());
	std::iota(members[0].begin(), members[0].end(), std::size_t {0});
	nodes[0].count = table.rows();
	nodes[0].sse = sse_of(table, members[0], nodes[0].value);

	struct Candidate {
		bool evaluated = false;
		std::optional<SplitChoice> split;
	};
	std::vector<Candidate> candidates(1);
	std::size_t leaves = 1;

	while (leaves < config.max_leaves) {
		int pick = -1;
		double pick_gain = 0.0;
		for (std::size_t k = 0; k < nodes.size(); ++k) {
			if (!nodes[k].leaf) {
				continue;
			}
			Candidate &c = candidates[k];
			if (!c.evaluated) {
				c.evaluated = true;
				const std::size_t cnt = members[k].size();
				if (cnt >= config.min_parent_size && cnt >= 2 * config.min_node_size) {
					c.split = best_split_rows(table, members[k], config.min_node_size);
				}
			}
			if (!c.split) {
				continue;
			}
			const double gain = nodes[k].sse - c.split->cost();
			if (pick < 0 || gain > pick_gain) {
				pick = static_cast<int>(k);
				pick_gain = gain;
			}
		}
		if (pick < 0) {
			break;
		}

		const auto k = static_cast<std::size_t>(pick);
		const SplitChoice split = *candidates[k].split;
		std::vector<std::size_t> left_rows, right_rows;
		for (std::size_t r : members[k]) {
			(table.at(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
		}
		for (auto *part : {&left_rows, &right_rows}) {
			Node child;
			child.count = part->size();
			child.sse = sse_of(table, *part, child.value);
			nodes.push_back(child);
			members.push_back(std::move(*part));
			candidates.emplace_back();
		}
		Node &parent = nodes[k];
		parent.leaf = false;
		parent.feature = split.feature;
		parent.threshold = split.threshold;
		parent.left = static_cast<int>(nodes.size()) - 2;
		parent.right = static_cast<int>(nodes.size()) - 1;
		members[k].clear();
		++leaves;
	}
	return Tree(std::move(nodes));
}

Tree grow(const Series &series, const GrowConfig &config) {
	return grow(Table::from_series(series), config);
}

Tree prune(const Tree &tree, double alpha) {
	if (!(alpha >= 0.0)) {
		throw InvalidArgument("prune: alpha must be nonnegative");
	}
	Tree current = tree.compacted();
	for (;;) {
		const auto &nodes = current.nodes();
		// Subtree leaf SSE and leaf counts, children before parents.
		std::vector<double> subtree_sse(nodes.size(), 0.0);
		std::vector<std::size_t> subtree_leaves(nodes.size(), 0);
		for (std::size_t i = nodes.size(); i-- > 0;) {
			const Node &n = nodes[i];
			if (n.leaf) {
				subtree_sse[i] = n.sse;
				subtree_leaves[i] = 1;
			} else {
				const auto l = static_cast<std::size_t>(n.left);
				const auto r = static_cast<std::size_t>(n.right);
				subtree_sse[i] = subtree_sse[l] + subtree_sse[r];
				subtree_leaves[i] = subtree_leaves[l] + subtree_leaves[r];
			}
		}
		int weakest = -1;
		double weakest_g = 0.0;
		for (int k : current.internal_nodes()) {
			const auto i = static_cast<std::size_t>(k);
			const double g = (nodes[i].sse - subtree_sse[i]) / static_cast<double>(subtree_leaves[i] - 1);
			if (weakest < 0 || g < weakest_g) {
				weakest = k;
				weakest_g = g;
			}
		}
		if (weakest < 0 || weakest_g > alpha) {
			return current;
		}
		current = current.collapsed(weakest);
	}
}

BagEnsemble::BagEnsemble(std::vector<Tree> trees, std::vector<std::uint64_t> seeds)
    : trees_(std::move(trees)), seeds_(std::move(seeds)) {
	if (trees_.empty()) {
		throw InvalidArgument("bagged ensemble needs at least one tree");
	}
}

double BagEnsemble::predict(std::span<const double> x) const {
	double s = 0.0;
	for (const Tree &t : trees_) {
		s += t.predict(x);
	}
	return s / static_cast<double>(trees_.size());
}

std::uint64_t member_seed(std::uint64_t seed, std::size_t b) {
	std::seed_seq seq {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
	                   static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(static_cast<std::uint64_t>(b) >> 32)};
	std::uint32_t out[2];
	seq.generate(out, out + 2);
	return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

BagEnsemble bag_fit(const Table &table, std::size_t B, const GrowConfig &config, std::uint64_t seed, bool resample) {
	table.validate();
	if (B < 1) {
		throw InvalidArgument("bag_fit: B must be at least 1");
	}
	if (table.rows() == 0) {
		throw InvalidArgument("bag_fit: empty training table");
	}
	std::vector<Tree> trees;
	std::vector<std::uint64_t> seeds;
	trees.reserve(B);
	for (std::size_t b = 0; b < B; ++b) {
		const std::uint64_t s = member_seed(seed, b);
		seeds.push_back(s);
		if (!resample) {
			trees.push_back(grow(table, config));
			continue;
		}
		std::mt19937_64 rng(s);
		std::uniform_int_distribution<std::size_t> pick(0, table.rows() - 1);
		Table sample;
		sample.n_features = table.n_features;
		sample.x.reserve(table.x.size());
		sample.y.reserve(table.rows());
		for (std::size_t i = 0; i < table.rows(); ++i) {
			const std::size_t r = pick(rng);
			const auto row = table.row(r);
			sample.x.insert(sample.x.end(), row.begin(), row.end());
			sample.y.push_back(table.y[r]);
		}
		trees.push_back(grow(sample, config));
	}
	return BagEnsemble(std::move(trees), std::move(seeds));
}

long PeriodicWrapper::base_time(long t) const {
	long m = (t - t0) % period;
	if (m < 0) {
		m += period;
	}
	return m + t0;
}

double periodic_predict(const PeriodicWrapper &wrapper, long t) {
	if (wrapper.period < 1) {
		throw InvalidArgument("periodic_predict: period must be at least 1");
	}
	return wrapper.inner(static_cast<double>(wrapper.base_time(t)));
}

PeriodicWrapper fit_prototype(const Series &series, long period, std::size_t n_periods, const GrowConfig &config,
                              MultiPeriodMode mode, double prune_alpha) {
	if (period < 1 || n_periods < 1) {
		throw InvalidArgument("fit_prototype: period and period count must be positive");
	}
	const std::size_t span = static_cast<std::size_t>(period) * n_periods;
	if (series.size() < span) {
		throw InvalidArgument("fit_prototype: " + std::to_string(n_periods) + " periods of " + std::to_string(period) +
		                      " need " + std::to_string(span) + " samples, series has " +
		                      std::to_string(series.size()));
	}
	const Series window = series.slice(series.size() - span, span);
	PeriodicWrapper proto;
	proto.period = period;
	proto.t0 = series.t0;

	auto phase_table = [&](const Series &s) {
		Table t;
		t.n_features = 1;
		for (std::size_t i = 0; i < s.size(); ++i) {
			t.x.push_back(static_cast<double>(proto.base_time(s.t0 + static_cast<long>(i))));
			t.y.push_back(s.values[i]);
		}
		return t;
	};

	if (mode == MultiPeriodMode::Pooled || n_periods == 1) {
		const Tree tree = prune(grow(phase_table(window), config), prune_alpha);
		proto.inner = [tree](double x) { return tree.predict(x); };
		return proto;
	}
	std::vector<Tree> trees;
	std::vector<std::uint64_t> ids;
	for (std::size_t k = 0; k < n_periods; ++k) {
		const Series day = window.slice(k * static_cast<std::size_t>(period), static_cast<std::size_t>(period));
		trees.push_back(prune(grow(phase_table(day), config), prune_alpha));
		ids.push_back(k);
	}
	const BagEnsemble ensemble(std::move(trees), std::move(ids));
	proto.inner = [ensemble](double x) { return ensemble.predict(x); };
	return proto;
}

} // namespace wxcast::tree
