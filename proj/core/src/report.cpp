#include "wxcast/errors.hpp"
#include "wxcast/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace wxcast::io {

namespace {

std::string csv_cell(const std::string &s) {
	if (s.find_first_of(",\"\n") == std::string::npos) {
		return s;
	}
	std::string out = "\"";
	for (char c : s) {
		if (c == '"') {
			out += '"';
		}
		out += c;
	}
	return out + "\"";
}

void write_file(const std::filesystem::path &path, const std::string &text) {
	std::ofstream out(path, std::ios::binary);
	if (!out) {
		throw IoError("cannot write " + path.string());
	}
	out << text;
	if (!out) {
		throw IoError("write failed for " + path.string());
	}
}

} // namespace

std::string format_reports(const std::vector<eval::EvalReport> &reports, ReportFormat format) {
	if (reports.empty()) {
		throw InvalidArgument("export_report: no reports");
	}
	if (format == ReportFormat::Json) {
		nlohmann::json arr = nlohmann::json::array();
		for (const auto &r : reports) {
			nlohmann::json row;
			row["method"] = r.method;
			row["train_rmse"] = r.train_rmse ? nlohmann::json(*r.train_rmse) : nlohmann::json(nullptr);
			// A failed method has no forecast, so its runs are absent rather than zero.
			row["inner_run"] = r.failed ? nlohmann::json(nullptr) : nlohmann::json(r.inner_run);
			row["outer_run"] = r.failed ? nlohmann::json(nullptr) : nlohmann::json(r.outer_run);
			arr.push_back(std::move(row));
		}
		return arr.dump(2) + "\n";
	}
	std::ostringstream os;
	os << "method,train_rmse,inner_run,outer_run\n";
	for (const auto &r : reports) {
		os << csv_cell(r.method) << ',' << (r.train_rmse ? format_number(*r.train_rmse) : std::string()) << ',';
		if (!r.failed) {
			os << r.inner_run << ',' << r.outer_run;
		} else {
			os << ',';
		}
		os << '\n';
	}
	return os.str();
}

void export_report(const std::vector<eval::EvalReport> &reports, ReportFormat format,
                   const std::filesystem::path &path) {
	write_file(path, format_reports(reports, format));
}

std::vector<eval::EvalReport> parse_report_json(std::string_view json_text) {
	nlohmann::json j;
	try {
		j = nlohmann::json::parse(json_text);
	} catch (const nlohmann::json::parse_error &e) {
		throw ParseError(std::string("report is not valid JSON: ") + e.what());
	}
	if (!j.is_array()) {
		throw ParseError("report JSON must be an array");
	}
	std::vector<eval::EvalReport> out;
	for (const auto &row : j) {
		eval::EvalReport r;
		try {
			r.method = row.at("method").get<std::string>();
			if (!row.at("train_rmse").is_null()) {
				r.train_rmse = row.at("train_rmse").get<double>();
			}
			if (row.at("inner_run").is_null() || row.at("outer_run").is_null()) {
				r.failed = true;
			} else {
				r.inner_run = row.at("inner_run").get<std::size_t>();
				r.outer_run = row.at("outer_run").get<std::size_t>();
			}
		} catch (const nlohmann::json::exception &e) {
			throw ParseError(std::string("report row: ") + e.what());
		}
		out.push_back(std::move(r));
	}
	return out;
}

std::string format_plot(const Series &series) {
	std::ostringstream os;
	os << "t,value\n";
	for (std::size_t i = 0; i < series.size(); ++i) {
		os << series.t0 + static_cast<long>(i) << ',' << format_number(series.values[i]) << '\n';
	}
	return os.str();
}

void export_plot(const Series &series, const std::filesystem::path &path) {
	write_file(path, format_plot(series));
}

} // namespace wxcast::io
