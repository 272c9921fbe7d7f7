#include "wxcast/fixtures.hpp"

#include "wxcast/errors.hpp"

#include <string>

namespace wxcast::fixtures {

namespace {

// Hourly targets, t = 1..48.
constexpr double kWind[48] = {
    3.6, 3.1, 2.6, 0.0, 2.1, 0.0, 3.1, 3.1, 3.6, 3.6, 4.6, 6.7, 6.7, 6.2, 5.7, 8.8,
    8.8, 6.2, 5.7, 4.1, 5.7, 4.6, 2.6, 2.6, 2.6, 1.5, 0.0, 1.5, 0.0, 1.5, 2.1, 0.0,
    4.6, 4.1, 5.2, 5.2, 5.2, 6.7, 6.2, 5.7, 5.7, 5.7, 5.2, 3.6, 3.6, 3.1, 2.6, 2.6,
};

constexpr double kTemp[48] = {
    15.6, 15.6, 15.6, 16.1, 16.1, 16.7, 16.1, 16.7, 17.2, 18.3, 19.4, 19.4, 19.4, 18.9, 17.8, 18.3,
    17.8, 16.1, 15.6, 15.0, 14.4, 14.4, 14.4, 15.0, 15.0, 15.0, 15.0, 15.0, 15.6, 16.1, 16.1, 17.2,
    17.2, 17.2, 19.4, 19.4, 20.0, 19.4, 18.9, 18.9, 18.3, 17.2, 16.7, 16.1, 15.6, 15.6, 15.6, 15.6,
};

constexpr double kDni[48] = {
    0,   0,   0,   0,   0,   0,   0,   0,   70,  261, 537, 810, 832, 806, 765, 634,
    356, 298, 149, 0,   0,   0,   0,   0,   0,   0,   0,   0,   0,   0,   11,  69,
    270, 599, 740, 612, 615, 570, 703, 622, 530, 327, 165, 0,   0,   0,   0,   0,
};

Series make_fixture(const double (&values)[48], const char *unit) {
	return Series(std::vector<double>(std::begin(values), std::end(values)), 1, 24, unit);
}

} // namespace

const FixtureSet &weather() {
	static const FixtureSet set {
	    make_fixture(kWind, "m/s"),
	    make_fixture(kTemp, "degC"),
	    make_fixture(kDni, "Wh/m^2"),
	};
	return set;
}

const Series &wind48() {
	return weather().wind48;
}
const Series &temp48() {
	return weather().temp48;
}
const Series &dni48() {
	return weather().dni48;
}

const Series &by_name(std::string_view name) {
	if (name == "wind48") {
		return wind48();
	}
	if (name == "temp48") {
		return temp48();
	}
	if (name == "dni48") {
		return dni48();
	}
	throw InvalidArgument("unknown fixture '" + std::string(name) + "' (expected wind48, temp48 or dni48)");
}

} // namespace wxcast::fixtures
