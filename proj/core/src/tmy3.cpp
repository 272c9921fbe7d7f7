#include "wxcast/errors.hpp"
#include "wxcast/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace wxcast::io {

namespace {

std::string_view trim(std::string_view s) {
	while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) {
		s.remove_prefix(1);
	}
	while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
		s.remove_suffix(1);
	}
	return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
	std::vector<std::string_view> cells;
	std::size_t start = 0;
	for (;;) {
		const std::size_t comma = line.find(',', start);
		cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
		if (comma == std::string_view::npos) {
			break;
		}
		start = comma + 1;
	}
	return cells;
}

std::optional<std::size_t> find_column(const std::vector<std::string_view> &header,
                                       const std::vector<std::string> &aliases) {
	for (const std::string &alias : aliases) {
		for (std::size_t c = 0; c < header.size(); ++c) {
			if (header[c] == alias) {
				return c;
			}
		}
	}
	return std::nullopt;
}

std::string join(const std::vector<std::string> &names) {
	std::string out;
	for (const std::string &n : names) {
		out += (out.empty() ? "\"" : ", \"") + n + "\"";
	}
	return out;
}

} // namespace

std::string format_number(double v) {
	char buf[64];
	const auto res = std::to_chars(buf, buf + sizeof(buf), v);
	return std::string(buf, res.ptr);
}

Tmy3Data parse_tmy3(std::istream &in, const FieldMap &fields) {
	Tmy3Data data;
	std::string line;
	if (!std::getline(in, line) || trim(line).empty()) {
		throw ParseError("TMY3: line 1 must hold the station metadata", 1);
	}
	data.station = std::string(trim(line));
	if (!std::getline(in, line)) {
		throw ParseError("TMY3: missing column header on line 2", 2);
	}
	const std::string header_line = line;
	const auto header = split_csv(header_line);
	const auto wind_col = find_column(header, fields.wind);
	const auto temp_col = find_column(header, fields.dry_bulb);
	const auto dni_col = find_column(header, fields.dni);
	if (!wind_col || !temp_col || !dni_col) {
		std::string missing;
		if (!wind_col) {
			missing += " wind speed (" + join(fields.wind) + ")";
		}
		if (!temp_col) {
			missing += " dry-bulb (" + join(fields.dry_bulb) + ")";
		}
		if (!dni_col) {
			missing += " DNI (" + join(fields.dni) + ")";
		}
		throw ParseError("TMY3: malformed header on line 2, missing column(s):" + missing, 2);
	}
	const auto date_col = find_column(header, fields.date);
	const auto time_col = find_column(header, fields.time);

	std::vector<double> wind, temp, dni;
	std::size_t line_no = 2;
	std::size_t row = 0;
	while (std::getline(in, line)) {
		++line_no;
		if (trim(line).empty()) {
			continue;
		}
		++row;
		const auto cells = split_csv(line);
		auto cell = [&](std::size_t col, const char *what) {
			if (col >= cells.size()) {
				throw ParseError("TMY3: row " + std::to_string(row) + " (line " + std::to_string(line_no) + ") has only " +
				                     std::to_string(cells.size()) + " columns, " + what + " is column " +
				                     std::to_string(col + 1),
				                 line_no, col + 1);
			}
			const std::string_view s = cells[col];
			double v = 0.0;
			const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
			if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
				throw ParseError("TMY3: row " + std::to_string(row) + " (line " + std::to_string(line_no) + "), column " +
				                     std::to_string(col + 1) + ": " + what + " value \"" + std::string(s) +
				                     "\" is not a number",
				                 line_no, col + 1);
			}
			if (v == -9900.0 || v == -9999.0) {
				throw ParseError("TMY3: row " + std::to_string(row) + " (line " + std::to_string(line_no) + "), column " +
				                     std::to_string(col + 1) + ": missing " + what + " value",
				                 line_no, col + 1);
			}
			return v;
		};
		wind.push_back(cell(*wind_col, "wind speed"));
		temp.push_back(cell(*temp_col, "dry-bulb"));
		dni.push_back(cell(*dni_col, "DNI"));
		if (date_col && time_col && *date_col < cells.size() && *time_col < cells.size()) {
			data.timestamps.push_back(std::string(cells[*date_col]) + " " + std::string(cells[*time_col]));
		}
	}
	if (row == 0) {
		throw ParseError("TMY3: no data rows after the header", line_no);
	}
	if (!data.timestamps.empty() && data.timestamps.size() != row) {
		data.timestamps.clear();
	}
	data.wind = Series(std::move(wind), 1, 24, "m/s");
	data.temperature = Series(std::move(temp), 1, 24, "degC");
	data.dni = Series(std::move(dni), 1, 24, "Wh/m^2");
	return data;
}

Tmy3Data parse_tmy3(const std::filesystem::path &path, const FieldMap &fields) {
	std::ifstream in(path);
	if (!in) {
		throw IoError("cannot open TMY3 file " + path.string());
	}
	return parse_tmy3(in, fields);
}

void export_tmy3(const Tmy3Data &data, std::ostream &out) {
	const std::size_t n = data.wind.size();
	if (data.temperature.size() != n || data.dni.size() != n) {
		throw InvalidArgument("export_tmy3: series lengths differ");
	}
	out << (data.station.empty() ? std::string("000000,\"EXPORT\",XX,0.0,0.0,0.0,0") : data.station) << '\n';
	out << "Date (MM/DD/YYYY),Time (HH:MM),Wind Speed (m/s),Dry-bulb (C),DNI (W/m^2)\n";
	for (std::size_t i = 0; i < n; ++i) {
		std::string date = "01/01/2000";
		std::string time;
		if (i < data.timestamps.size()) {
			const std::string &ts = data.timestamps[i];
			const auto sp = ts.find(' ');
			date = ts.substr(0, sp);
			time = sp == std::string::npos ? "" : ts.substr(sp + 1);
		} else {
			std::ostringstream os;
			os << (i % 24 + 1 < 10 ? "0" : "") << (i % 24 + 1) << ":00";
			time = os.str();
		}
		out << date << ',' << time << ',' << format_number(data.wind.values[i]) << ','
		    << format_number(data.temperature.values[i]) << ',' << format_number(data.dni.values[i]) << '\n';
	}
}

void export_tmy3(const Tmy3Data &data, const std::filesystem::path &path) {
	std::ofstream out(path);
	if (!out) {
		throw IoError("cannot write " + path.string());
	}
	export_tmy3(data, out);
	if (!out) {
		throw IoError("write failed for " + path.string());
	}
}

} // namespace wxcast::io
