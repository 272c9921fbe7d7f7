#pragma once

#include "wxcast/series.hpp"

#include <string_view>

namespace wxcast::fixtures {

/// Two days (48 hourly samples, t = 1..48) of Los Angeles TMY3 weather
/// targets: wind speed, dry-bulb temperature and direct normal irradiance.
struct FixtureSet {
	Series wind48;
	Series temp48;
	Series dni48;
};

const FixtureSet &weather();

const Series &wind48();
const Series &temp48();
const Series &dni48();

/// Looks up "wind48", "temp48" or "dni48". Throws InvalidArgument otherwise.
const Series &by_name(std::string_view name);

} // namespace wxcast::fixtures
