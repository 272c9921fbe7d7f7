#include "cli.hpp"

#include <CLI11.hpp>

#include "wxcast/arima.hpp"
#include "wxcast/errors.hpp"
#include "wxcast/evaluation.hpp"
#include "wxcast/io.hpp"
#include "wxcast/nexting.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace wxcast::cli {

namespace {

struct UsageError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

struct Common {
	std::string config;
	std::string data;
	std::string out;
	std::string format = "csv";
};

io::ReportFormat report_format(const std::string &f) {
	return f == "json" ? io::ReportFormat::Json : io::ReportFormat::Csv;
}

void emit(const Common &c, const std::string &text, std::ostream &out) {
	if (c.out.empty()) {
		out << text;
		return;
	}
	std::ofstream f(c.out, std::ios::binary);
	if (!f) {
		throw IoError("cannot write " + c.out);
	}
	f << text;
}

std::string format_series(const Series &s, const std::string &format, bool header) {
	if (format == "json") {
		nlohmann::json arr = nlohmann::json::array();
		for (std::size_t i = 0; i < s.size(); ++i) {
			arr.push_back({{"t", s.t0 + static_cast<long>(i)}, {"value", s.values[i]}});
		}
		return arr.dump(2) + "\n";
	}
	std::string text = io::format_plot(s);
	if (!header) {
		text.erase(0, text.find('\n') + 1);
	}
	return text;
}

io::RunConfig require_config(const Common &c) {
	if (c.config.empty()) {
		throw UsageError("--config is required");
	}
	if (!std::filesystem::exists(c.config)) {
		throw UsageError("config file not found: " + c.config);
	}
	try {
		return io::load_run_config(c.config);
	} catch (const ConfigError &e) {
		throw UsageError(e.what());
	}
}

std::optional<io::Tmy3Data> load_data(const Common &c) {
	if (c.data.empty()) {
		return std::nullopt;
	}
	return io::parse_tmy3(std::filesystem::path(c.data));
}

Series dataset_for(const io::RunConfig &cfg, const Common &c) {
	const auto tmy3 = load_data(c);
	return io::resolve_dataset(cfg, tmy3 ? &*tmy3 : nullptr);
}

const eval::MethodConfig &pick_method(const io::RunConfig &cfg, const std::string &name) {
	if (name.empty()) {
		return cfg.methods.front();
	}
	for (const auto &m : cfg.methods) {
		if (m.name == name || eval::method_kind(m.spec) == name) {
			return m;
		}
	}
	throw UsageError("no method named \"" + name + "\" in the config");
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
	CLI::App app {"Short-horizon weather forecasting baselines", "wxcast"};
	app.require_subcommand(1);

	Common common;
	auto add_common = [&](CLI::App *sub, bool config_data) {
		if (config_data) {
			sub->add_option("--config", common.config, "JSON run configuration");
			sub->add_option("--data", common.data, "TMY3 CSV file");
		}
		sub->add_option("--out", common.out, "Write output to this file instead of stdout");
		sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
	};

	double period = 100.0;
	long count = 200;
	double amplitude = 1.0;
	double phase = 0.0;
	auto *synth = app.add_subcommand("synth", "Emit a sampled sine wave");
	synth->add_option("--period", period, "Period in samples");
	synth->add_option("--count", count, "Number of samples");
	synth->add_option("--amplitude", amplitude, "Amplitude");
	synth->add_option("--phase", phase, "Phase in radians");
	add_common(synth, false);

	std::string method_name;
	auto *fit = app.add_subcommand("fit", "Fit one method and print its values over the training window");
	fit->add_option("--method", method_name, "Method name or kind (default: first in config)");
	add_common(fit, true);
	auto *fc = app.add_subcommand("forecast", "Fit one method and print its forecast");
	fc->add_option("--method", method_name, "Method name or kind (default: first in config)");
	add_common(fc, true);

	std::string plot_dir;
	auto *cmp = app.add_subcommand("compare", "Run every configured method and print the report");
	cmp->add_option("--plot-dir", plot_dir, "Write t,value files for each method's fit and forecast");
	add_common(cmp, true);

	std::optional<std::size_t> freeze_after;
	auto *nx = app.add_subcommand("nexting-run", "Stream the dataset through a Nexting learner");
	nx->add_option("--freeze-after", freeze_after, "Freeze the weights after this many updates");
	nx->add_option("--method", method_name, "Nexting method name (default: first nexting block)");
	add_common(nx, true);

	int max_lag = 24;
	auto *acf = app.add_subcommand("acf", "Sample ACF and PACF of the dataset");
	acf->add_option("--max-lag", max_lag, "Largest lag")->check(CLI::PositiveNumber);
	acf->add_option("--period", period, "Sine period when no config is given");
	acf->add_option("--count", count, "Sine length when no config is given");
	add_common(acf, true);

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp &) {
		out << app.help();
		return 0;
	} catch (const CLI::ParseError &e) {
		err << "error: " << e.what() << "\n" << app.help();
		return 1;
	}

	try {
		if (synth->parsed()) {
			if (!(period > 0.0) || count < 1) {
				throw UsageError("--period must be positive and --count at least 1");
			}
			emit(common, format_series(make_sine(amplitude, period, count, phase), common.format, false), out);
			return 0;
		}
		if (fit->parsed() || fc->parsed()) {
			const auto cfg = require_config(common);
			const auto &method = pick_method(cfg, method_name);
			const Series data = dataset_for(cfg, common);
			const auto report = eval::evaluate_method(data, method, cfg.band, cfg.options());
			const Series &s = fit->parsed() ? report.fitted : report.forecast;
			emit(common, format_series(s, common.format, true), out);
			return 0;
		}
		if (cmp->parsed()) {
			const auto cfg = require_config(common);
			const Series data = dataset_for(cfg, common);
			const auto reports = eval::compare(data, cfg.methods, cfg.band, cfg.options());
			for (const auto &r : reports) {
				if (r.failed) {
					err << "note: " << r.method << " failed: " << r.error << "\n";
				}
			}
			if (!plot_dir.empty()) {
				std::filesystem::create_directories(plot_dir);
				for (std::size_t k = 0; k < reports.size(); ++k) {
					const auto &r = reports[k];
					const std::string stem = std::to_string(k) + "_" + eval::method_kind(cfg.methods[k].spec);
					if (!r.fitted.empty()) {
						io::export_plot(r.fitted, std::filesystem::path(plot_dir) / (stem + "_fit.csv"));
					}
					if (!r.forecast.empty()) {
						io::export_plot(r.forecast, std::filesystem::path(plot_dir) / (stem + "_forecast.csv"));
					}
				}
				io::export_plot(data, std::filesystem::path(plot_dir) / "target.csv");
			}
			emit(common, io::format_reports(reports, report_format(common.format)), out);
			return 0;
		}
		if (nx->parsed()) {
			const auto cfg = require_config(common);
			const eval::NextingMethod *m = nullptr;
			for (const auto &mc : cfg.methods) {
				if (const auto *p = std::get_if<eval::NextingMethod>(&mc.spec)) {
					if (method_name.empty() || mc.name == method_name) {
						m = p;
						break;
					}
				}
			}
			if (!m) {
				throw UsageError("config has no matching nexting method");
			}
			const Series data = dataset_for(cfg, common);
			const std::size_t first = std::min(cfg.train_length, data.size());
			UnitRange range = value_range(data.slice(0, first));
			if (!(range.hi > range.lo)) {
				range.lo -= 0.5;
				range.hi += 0.5;
			}
			const Series unit = normalize_unit(data, range.lo, range.hi);
			Series pred = nexting::run_online({unit}, m->coder, m->params, freeze_after).front();
			for (double &v : pred.values) {
				v = range.from_unit(v);
			}
			emit(common, format_series(pred, common.format, true), out);
			return 0;
		}
		if (acf->parsed()) {
			Series data;
			if (!common.config.empty()) {
				data = dataset_for(require_config(common), common);
			} else if (!common.data.empty()) {
				data = io::parse_tmy3(std::filesystem::path(common.data)).wind;
			} else {
				data = make_sine(1.0, period, count);
			}
			const auto c = arima::acf_pacf(data, max_lag);
			std::ostringstream os;
			if (common.format == "json") {
				os << nlohmann::json({{"acf", c.acf}, {"pacf", c.pacf}}).dump(2) << "\n";
			} else {
				os << "lag,acf,pacf\n";
				for (std::size_t k = 0; k < c.acf.size(); ++k) {
					os << k << ',' << io::format_number(c.acf[k]) << ',' << io::format_number(c.pacf[k]) << '\n';
				}
			}
			emit(common, os.str(), out);
			return 0;
		}
	} catch (const UsageError &e) {
		err << "error: " << e.what() << "\n";
		return 1;
	} catch (const std::exception &e) {
		err << "error: " << e.what() << "\n";
		return 2;
	}
	return 1;
}

} // namespace wxcast::cli
