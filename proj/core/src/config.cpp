#include "wxcast/errors.hpp"
#include "wxcast/fixtures.hpp"
#include "wxcast/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace wxcast::io {

namespace {

using nlohmann::json;

// Object reader that insists on every requested key and rejects leftovers.
class Reader {
public:
	Reader(const json &j, std::string where) : j_(j), where_(std::move(where)) {
		if (!j_.is_object()) {
			fail("expected an object");
		}
	}

	[[noreturn]] void fail(const std::string &msg) const {
		throw ConfigError(where_ + ": " + msg);
	}

	bool has(const std::string &key) const {
		return j_.contains(key);
	}

	const json &get(const std::string &key) {
		if (!j_.contains(key)) {
			fail("missing field \"" + key + "\"");
		}
		used_.insert(key);
		return j_.at(key);
	}

	double number(const std::string &key) {
		const json &v = get(key);
		if (!v.is_number()) {
			fail("field \"" + key + "\" must be a number");
		}
		const double d = v.get<double>();
		if (!std::isfinite(d)) {
			fail("field \"" + key + "\" must be finite");
		}
		return d;
	}

	long integer(const std::string &key) {
		const json &v = get(key);
		if (!v.is_number_integer()) {
			fail("field \"" + key + "\" must be an integer");
		}
		return v.get<long>();
	}

	std::size_t count(const std::string &key) {
		const long v = integer(key);
		if (v < 0) {
			fail("field \"" + key + "\" must be nonnegative");
		}
		return static_cast<std::size_t>(v);
	}

	bool boolean(const std::string &key) {
		const json &v = get(key);
		if (!v.is_boolean()) {
			fail("field \"" + key + "\" must be true or false");
		}
		return v.get<bool>();
	}

	std::string string(const std::string &key) {
		const json &v = get(key);
		if (!v.is_string()) {
			fail("field \"" + key + "\" must be a string");
		}
		return v.get<std::string>();
	}

	void finish() const {
		for (const auto &item : j_.items()) {
			if (!used_.count(item.key())) {
				fail("unknown field \"" + item.key() + "\"");
			}
		}
	}

	const std::string &where() const {
		return where_;
	}

private:
	const json &j_;
	std::string where_;
	std::set<std::string> used_;
};

linmodels::BasisFunction parse_basis(const json &j, const std::string &where) {
	Reader r(j, where);
	const std::string kind = r.string("kind");
	linmodels::BasisFunction f;
	if (kind == "constant") {
		f = linmodels::BasisFunction::constant();
	} else if (kind == "monomial") {
		const long deg = r.integer("degree");
		if (deg < 0) {
			r.fail("monomial degree must be nonnegative");
		}
		f = linmodels::BasisFunction::monomial(static_cast<int>(deg));
	} else if (kind == "sinusoid") {
		const double period = r.number("period");
		const double phase = r.number("phase");
		if (!(period > 0.0)) {
			r.fail("sinusoid period must be positive");
		}
		f = linmodels::BasisFunction::sinusoid(period, phase);
	} else if (kind == "gaussian") {
		const double center = r.number("center");
		const double sigma = r.number("sigma");
		if (!(sigma > 0.0)) {
			r.fail("gaussian sigma must be positive");
		}
		f = linmodels::BasisFunction::gaussian(center, sigma);
	} else {
		r.fail("unknown basis kind \"" + kind + "\"");
	}
	r.finish();
	return f;
}

eval::MethodConfig parse_method(const json &j, std::size_t index) {
	Reader r(j, "methods[" + std::to_string(index) + "]");
	eval::MethodConfig m;
	const std::string kind = r.string("method");
	m.name = r.string("name");
	if (kind == "polynomial") {
		eval::PolynomialMethod p;
		p.degree = static_cast<int>(r.integer("degree"));
		m.spec = p;
	} else if (kind == "ridge") {
		eval::RidgeMethod p;
		p.lambda = r.number("lambda");
		const json &basis = r.get("basis");
		if (!basis.is_array() || basis.empty()) {
			r.fail("ridge basis must be a nonempty array");
		}
		std::vector<linmodels::BasisFunction> fs;
		for (std::size_t k = 0; k < basis.size(); ++k) {
			fs.push_back(parse_basis(basis[k], r.where() + ".basis[" + std::to_string(k) + "]"));
		}
		p.basis = linmodels::BasisSet(std::move(fs));
		m.spec = p;
	} else if (kind == "rbf") {
		eval::RbfMethod p;
		p.n_basis = static_cast<int>(r.integer("n_basis"));
		p.sigma = r.number("sigma");
		const std::string centers = r.string("centers");
		if (centers == "even") {
			p.centers = linmodels::CenterPlacement::EvenlySpaced;
		} else if (centers == "data") {
			p.centers = linmodels::CenterPlacement::DataPoints;
		} else {
			r.fail("centers must be \"even\" or \"data\"");
		}
		p.bias = r.boolean("bias");
		m.spec = p;
	} else if (kind == "spline") {
		eval::SplineMethod p;
		p.lambda = r.number("lambda");
		const std::string ex = r.string("extrapolation");
		if (ex == "natural") {
			p.extrapolation = smoothers::Extrapolation::Natural;
		} else if (ex == "cubic") {
			p.extrapolation = smoothers::Extrapolation::BoundaryCubic;
		} else {
			r.fail("extrapolation must be \"natural\" or \"cubic\"");
		}
		m.spec = p;
	} else if (kind == "kernel") {
		eval::KernelMethod p;
		const std::string k = r.string("kernel");
		if (k == "gaussian") {
			p.kernel = smoothers::Kernel::Gaussian;
		} else if (k == "epanechnikov") {
			p.kernel = smoothers::Kernel::Epanechnikov;
		} else {
			r.fail("kernel must be \"gaussian\" or \"epanechnikov\"");
		}
		const json &bw = r.get("bandwidth");
		if (bw.is_null()) {
			p.bandwidth.reset();
		} else if (bw.is_number()) {
			p.bandwidth = bw.get<double>();
		} else {
			r.fail("bandwidth must be a number or null");
		}
		m.spec = p;
	} else if (kind == "arima") {
		eval::ArimaMethod p;
		p.order.p = static_cast<int>(r.integer("p"));
		p.order.d = static_cast<int>(r.integer("d"));
		p.order.q = static_cast<int>(r.integer("q"));
		arima::SeasonalOrder so;
		so.P = static_cast<int>(r.integer("P"));
		so.D = static_cast<int>(r.integer("D"));
		so.Q = static_cast<int>(r.integer("Q"));
		so.s = static_cast<int>(r.integer("s"));
		if (so.s != 0 || so.P != 0 || so.D != 0 || so.Q != 0) {
			p.order.seasonal = so;
		}
		p.train_periods = static_cast<int>(r.integer("train_periods"));
		m.spec = p;
	} else if (kind == "tree") {
		eval::TreeMethod p;
		p.grow.max_leaves = r.count("max_leaves");
		p.grow.min_parent_size = r.count("min_parent_size");
		p.grow.min_node_size = r.count("min_leaf_size");
		p.prune_alpha = r.number("alpha");
		p.period = r.integer("period");
		const long periods = r.integer("periods");
		if (periods < 1) {
			r.fail("periods must be at least 1");
		}
		p.periods = static_cast<std::size_t>(periods);
		m.spec = p;
	} else if (kind == "nexting") {
		eval::NextingMethod p;
		p.params.gamma = {r.number("gamma")};
		p.params.alpha = r.number("alpha");
		p.params.trace_lambda = r.number("trace_lambda");
		const std::string step = r.string("step_size");
		if (step == "per_feature") {
			p.params.step_size = nexting::StepSize::PerActiveFeature;
		} else if (step == "raw") {
			p.params.step_size = nexting::StepSize::Raw;
		} else {
			r.fail("step_size must be \"per_feature\" or \"raw\"");
		}
		p.coder.n_tilings = r.count("tilings");
		p.coder.tiles_per_dim = r.count("tiles");
		p.coder.include_bias = r.boolean("bias");
		p.freeze_after = r.count("freeze_after");
		p.max_shift = r.count("max_shift");
		m.spec = p;
	} else {
		r.fail("unknown method \"" + kind + "\"");
	}
	r.finish();
	try {
		validate_method(m);
	} catch (const std::exception &e) {
		r.fail(e.what());
	}
	return m;
}

SignalSource parse_signal(Reader &r) {
	const std::string s = r.string("signal");
	if (s == "wind") {
		return SignalSource::Wind;
	}
	if (s == "temperature") {
		return SignalSource::Temperature;
	}
	if (s == "irradiance") {
		return SignalSource::Irradiance;
	}
	if (s == "fixture") {
		return SignalSource::Fixture;
	}
	if (s == "synthetic") {
		return SignalSource::Synthetic;
	}
	r.fail("signal must be one of wind, temperature, irradiance, fixture, synthetic");
}

} // namespace

void validate_method(const eval::MethodConfig &method) {
	std::visit(
	    [](const auto &m) {
		    using T = std::decay_t<decltype(m)>;
		    if constexpr (std::is_same_v<T, eval::PolynomialMethod>) {
			    if (m.degree < 0) {
				    throw InvalidArgument("polynomial degree must be nonnegative");
			    }
		    } else if constexpr (std::is_same_v<T, eval::RidgeMethod>) {
			    if (!(m.lambda >= 0.0)) {
				    throw InvalidArgument("ridge lambda must be nonnegative");
			    }
		    } else if constexpr (std::is_same_v<T, eval::RbfMethod>) {
			    if (m.n_basis < 1) {
				    throw InvalidArgument("rbf needs at least one basis function");
			    }
			    if (!(m.sigma > 0.0)) {
				    throw InvalidArgument("rbf sigma must be positive");
			    }
		    } else if constexpr (std::is_same_v<T, eval::SplineMethod>) {
			    if (!(m.lambda >= 0.0)) {
				    throw InvalidArgument("spline lambda must be nonnegative");
			    }
		    } else if constexpr (std::is_same_v<T, eval::KernelMethod>) {
			    if (m.bandwidth) {
				    smoothers::KernelConfig {m.kernel, *m.bandwidth}.validate();
			    }
		    } else if constexpr (std::is_same_v<T, eval::ArimaMethod>) {
			    m.order.validate();
			    if (m.train_periods < 1) {
				    throw InvalidArgument("arima train_periods must be at least 1");
			    }
		    } else if constexpr (std::is_same_v<T, eval::TreeMethod>) {
			    m.grow.validate();
			    if (!(m.prune_alpha >= 0.0)) {
				    throw InvalidArgument("tree alpha must be nonnegative");
			    }
			    if (m.period < 1 || m.periods < 1) {
				    throw InvalidArgument("tree period and periods must be positive");
			    }
		    } else if constexpr (std::is_same_v<T, eval::NextingMethod>) {
			    m.params.validate();
			    m.coder.validate();
		    }
	    },
	    method.spec);
}

RunConfig parse_run_config(std::string_view json_text) {
	json j;
	try {
		j = json::parse(json_text);
	} catch (const json::parse_error &e) {
		throw ConfigError(std::string("config is not valid JSON: ") + e.what());
	}
	Reader r(j, "config");
	RunConfig c;
	c.signal = parse_signal(r);
	if (c.signal == SignalSource::Fixture) {
		c.fixture = r.string("fixture");
		try {
			(void)fixtures::by_name(c.fixture);
		} catch (const std::exception &e) {
			r.fail(e.what());
		}
	}
	if (c.signal == SignalSource::Wind || c.signal == SignalSource::Temperature ||
	    c.signal == SignalSource::Irradiance) {
		c.day_offset = r.integer("day_offset");
		if (c.day_offset < 0) {
			r.fail("day_offset must be nonnegative");
		}
	}
	if (c.signal == SignalSource::Synthetic) {
		Reader s(r.get("synthetic"), "config.synthetic");
		c.synthetic.amplitude = s.number("amplitude");
		c.synthetic.period = s.number("period");
		c.synthetic.count = s.integer("count");
		c.synthetic.phase = s.number("phase");
		s.finish();
		if (!(c.synthetic.period > 0.0) || c.synthetic.count < 2) {
			s.fail("period must be positive and count at least 2");
		}
	}
	{
		Reader b(r.get("band"), "config.band");
		c.band.inner = b.number("inner");
		c.band.outer = b.number("outer");
		c.band.unit = b.string("unit");
		b.finish();
		try {
			c.band.validate();
		} catch (const std::exception &e) {
			b.fail(e.what());
		}
	}
	if (r.has("train_length")) {
		c.train_length = r.count("train_length");
	}
	if (r.has("forecast_length")) {
		c.forecast_length = r.count("forecast_length");
	}
	if (c.train_length == 0 || c.forecast_length == 0) {
		r.fail("train_length and forecast_length must be positive");
	}
	const json &methods = r.get("methods");
	if (!methods.is_array() || methods.empty()) {
		r.fail("methods must be a nonempty array");
	}
	for (std::size_t i = 0; i < methods.size(); ++i) {
		c.methods.push_back(parse_method(methods[i], i));
	}
	r.finish();
	return c;
}

RunConfig load_run_config(const std::filesystem::path &path) {
	std::ifstream in(path);
	if (!in) {
		throw IoError("cannot open config file " + path.string());
	}
	std::ostringstream ss;
	ss << in.rdbuf();
	try {
		return parse_run_config(ss.str());
	} catch (const ConfigError &e) {
		throw ConfigError(path.string() + ": " + e.what());
	}
}

Series resolve_dataset(const RunConfig &config, const Tmy3Data *tmy3) {
	switch (config.signal) {
	case SignalSource::Fixture:
		return fixtures::by_name(config.fixture);
	case SignalSource::Synthetic:
		return make_sine(config.synthetic.amplitude, config.synthetic.period, config.synthetic.count,
		                 config.synthetic.phase);
	default:
		break;
	}
	if (!tmy3) {
		throw InvalidArgument("signal requires TMY3 data (--data)");
	}
	const Series &full = config.signal == SignalSource::Wind          ? tmy3->wind
	                     : config.signal == SignalSource::Temperature ? tmy3->temperature
	                                                                  : tmy3->dni;
	// Longest training window any method asks for.
	std::size_t need = config.train_length;
	for (const auto &m : config.methods) {
		if (const auto *a = std::get_if<eval::ArimaMethod>(&m.spec)) {
			const int period = a->order.s() > 0 ? a->order.s() : 24;
			need = std::max(need, static_cast<std::size_t>(a->train_periods * period));
		} else if (const auto *t = std::get_if<eval::TreeMethod>(&m.spec)) {
			need = std::max(need, static_cast<std::size_t>(t->period) * t->periods);
		}
	}
	const std::size_t origin = static_cast<std::size_t>(config.day_offset) * 24 + config.train_length;
	const std::size_t end = origin + config.forecast_length;
	if (end > full.size()) {
		throw InvalidArgument("day_offset " + std::to_string(config.day_offset) + " runs past the end of the " +
		                      std::to_string(full.size()) + "-hour TMY3 series");
	}
	const std::size_t start = origin > need ? origin - need : 0;
	return full.slice(start, end - start);
}

} // namespace wxcast::io
