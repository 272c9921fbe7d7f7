#pragma once

#include "wxcast/evaluation.hpp"
#include "wxcast/series.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wxcast::io {

/// Accepted header names per field; the first match in the header wins.
struct FieldMap {
	std::vector<std::string> wind {"Wind Speed (m/s)", "Wspd (m/s)"};
	std::vector<std::string> dry_bulb {"Dry-bulb (C)", "Dbulb (C)"};
	std::vector<std::string> dni {"DNI (W/m^2)", "DNI (Wh/m^2)"};
	std::vector<std::string> date {"Date (MM/DD/YYYY)"};
	std::vector<std::string> time {"Time (HH:MM)"};
};

struct Tmy3Data {
	/// Metadata line, kept verbatim.
	std::string station;
	/// "MM/DD/YYYY HH:MM" per row when date and time columns exist.
	std::vector<std::string> timestamps;
	Series wind;
	Series temperature;
	Series dni;
};

/// Reads a TMY3 CSV: line 1 station metadata, line 2 column names, then one record per line.
Tmy3Data parse_tmy3(const std::filesystem::path &path, const FieldMap &fields = {});
Tmy3Data parse_tmy3(std::istream &in, const FieldMap &fields = {});

/// Writes the three series back in TMY3 layout (shortest round-trip number formatting).
void export_tmy3(const Tmy3Data &data, const std::filesystem::path &path);
void export_tmy3(const Tmy3Data &data, std::ostream &out);

enum class SignalSource { Wind, Temperature, Irradiance, Fixture, Synthetic };

struct SyntheticSpec {
	double amplitude = 1.0;
	double period = 100.0;
	long count = 200;
	double phase = 0.0;
};

struct RunConfig {
	SignalSource signal = SignalSource::Fixture;
	std::string fixture;
	/// 0-based TMY3 day used for training; the forecast covers the day after.
	long day_offset = 0;
	SyntheticSpec synthetic;
	eval::Band band;
	std::size_t train_length = 24;
	std::size_t forecast_length = 24;
	std::vector<eval::MethodConfig> methods;

	eval::CompareOptions options() const {
		return {train_length, forecast_length};
	}
};

/// Parses and validates a JSON run configuration. Throws ConfigError.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path &path);

/// Runs the module-level precondition checks for one method block.
void validate_method(const eval::MethodConfig &method);

/**
 * Series the comparison runs on: the named fixture, the synthetic sine, or a
 * window of the TMY3 signal ending after the forecast day. Weather signals
 * need `tmy3`.
 */
Series resolve_dataset(const RunConfig &config, const Tmy3Data *tmy3 = nullptr);

enum class ReportFormat { Csv, Json };

/// Absent RMSE and the runs of failed methods become empty CSV cells or JSON nulls.
std::string format_reports(const std::vector<eval::EvalReport> &reports, ReportFormat format);
void export_report(const std::vector<eval::EvalReport> &reports, ReportFormat format,
                   const std::filesystem::path &path);
/// Reads the JSON form back (method, train_rmse, inner_run, outer_run). Null runs mark a failed row.
std::vector<eval::EvalReport> parse_report_json(std::string_view json_text);

/// Two-column `t,value` CSV for external plotting.
std::string format_plot(const Series &series);
void export_plot(const Series &series, const std::filesystem::path &path);

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

} // namespace wxcast::io
