#include <catch2/catch_amalgamated.hpp>

#include "wxcast/errors.hpp"
#include "wxcast/fixtures.hpp"
#include "wxcast/series.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace wxcast;
using Catch::Matchers::WithinAbs;

TEST_CASE("make_sine samples at t = 1..count", "[core][sine]") {
	const Series s = make_sine(1.0, 100.0, 100);
	REQUIRE(s.size() == 100);
	REQUIRE(s.t0 == 1);
	CHECK_THAT(s.values[24], WithinAbs(1.0, 1e-15));
	CHECK_THAT(s.values[49], WithinAbs(0.0, 1e-12));

	const Series q = make_sine(2.0, 4.0, 4);
	const double expected[] = {2.0, 0.0, -2.0, 0.0};
	for (int i = 0; i < 4; ++i) {
		CHECK_THAT(q.values[i], WithinAbs(expected[i], 1e-12));
	}
}

TEST_CASE("make_sine rejects bad arguments", "[core][sine]") {
	CHECK_THROWS_AS(make_sine(1.0, 0.0, 10), InvalidArgument);
	CHECK_THROWS_AS(make_sine(1.0, -5.0, 10), InvalidArgument);
	CHECK_THROWS_AS(make_sine(1.0, 10.0, 0), InvalidArgument);
}

TEST_CASE("make_sine phase 2 pi is phase 0", "[core][sine][property]") {
	std::mt19937_64 rng(7);
	std::uniform_real_distribution<double> period(2.0, 200.0);
	std::uniform_real_distribution<double> amp(-5.0, 5.0);
	for (int trial = 0; trial < 50; ++trial) {
		const double p = period(rng);
		const double a = amp(rng);
		const Series s0 = make_sine(a, p, 64, 0.0);
		const Series s1 = make_sine(a, p, 64, 2.0 * std::numbers::pi);
		for (std::size_t i = 0; i < s0.size(); ++i) {
			REQUIRE_THAT(s1.values[i], WithinAbs(s0.values[i], 1e-12));
		}
	}
}

TEST_CASE("split cuts train and holdout", "[core][split]") {
	const Split sp = split(fixtures::wind48(), 24);
	CHECK(sp.D() == 24);
	CHECK(sp.F() == 24);
	CHECK(sp.train.t0 == 1);
	CHECK(sp.holdout.t0 == 25);

	const Split tiny = split(Series({3.0, 4.0}), 1);
	CHECK(tiny.train.values == std::vector<double> {3.0});
	CHECK(tiny.holdout.values == std::vector<double> {4.0});

	CHECK_THROWS_AS(split(make_sine(1, 100, 100), 100), InvalidArgument);
	CHECK_THROWS_AS(split(make_sine(1, 100, 100), 0), InvalidArgument);
}

TEST_CASE("split then join is the identity", "[core][split][property]") {
	std::mt19937_64 rng(11);
	std::normal_distribution<double> val(0.0, 3.0);
	for (int trial = 0; trial < 100; ++trial) {
		const std::size_t n = 2 + rng() % 60;
		Series s;
		s.t0 = static_cast<long>(rng() % 50) - 10;
		s.unit = "u";
		for (std::size_t i = 0; i < n; ++i) {
			s.values.push_back(val(rng));
		}
		const std::size_t D = 1 + rng() % (n - 1);
		const Split sp = split(s, D);
		REQUIRE(sp.D() + sp.F() == n);
		const Series back = sp.joined();
		REQUIRE(back.values == s.values);
		REQUIRE(back.t0 == s.t0);
	}
}

TEST_CASE("normalize_unit maps and clamps", "[core][normalize]") {
	const Series a = normalize_unit(Series({0.0, 5.0, 10.0}), 0.0, 10.0);
	CHECK(a.values == std::vector<double> {0.0, 0.5, 1.0});
	const Series b = normalize_unit(Series({-1.0, 11.0}), 0.0, 10.0);
	CHECK(b.values == std::vector<double> {0.0, 1.0});
	CHECK_THROWS_AS(normalize_unit(Series({1.0}), 1.0, 1.0), InvalidArgument);
	CHECK_THROWS_AS(normalize_unit(Series({1.0}), 2.0, 1.0), InvalidArgument);

	const Series train = split(fixtures::temp48(), 24).train;
	const UnitRange r = value_range(train);
	for (double v : normalize_unit(train, r.lo, r.hi).values) {
		CHECK(v >= 0.0);
		CHECK(v <= 1.0);
	}
}

TEST_CASE("normalize_unit on [0, 1] is idempotent", "[core][normalize][property]") {
	std::mt19937_64 rng(5);
	std::uniform_real_distribution<double> val(-2.0, 3.0);
	for (int trial = 0; trial < 50; ++trial) {
		Series s;
		for (int i = 0; i < 20; ++i) {
			s.values.push_back(val(rng));
		}
		const Series once = normalize_unit(s, 0.0, 1.0);
		REQUIRE(normalize_unit(once, 0.0, 1.0) == once);
	}
}

TEST_CASE("UnitRange round trip inside the range", "[core][normalize]") {
	const UnitRange r {-4.0, 6.0};
	for (double v : {-4.0, -1.5, 0.0, 2.5, 6.0}) {
		CHECK_THAT(r.from_unit(r.to_unit(v)), WithinAbs(v, 1e-12));
	}
}

TEST_CASE("Series time indexing", "[core][series]") {
	const Series s({1.0, 2.0, 3.0}, 5);
	CHECK(s.t_end() == 7);
	CHECK(s.at_time(6) == 2.0);
	CHECK_THROWS_AS(s.at_time(4), InvalidArgument);
	CHECK_THROWS_AS(s.at_time(8), InvalidArgument);
	CHECK(s.times() == std::vector<double> {5.0, 6.0, 7.0});
	const Series tail = s.slice(1, 2);
	CHECK(tail.t0 == 6);
	CHECK_THROWS_AS(s.slice(2, 2), InvalidArgument);
}

TEST_CASE("statistics helpers", "[core][stats]") {
	const std::vector<double> v {1.0, 2.0, 3.0, 4.0};
	CHECK(mean(v) == 2.5);
	CHECK(population_variance(v) == 1.25);
	CHECK_THROWS_AS(mean(std::vector<double> {}), InvalidArgument);
	CHECK_THROWS_AS(value_range(Series {}), InvalidArgument);
}

TEST_CASE("weather fixtures", "[core][fixtures]") {
	const auto &set = fixtures::weather();
	for (const Series *s : {&set.wind48, &set.temp48, &set.dni48}) {
		CHECK(s->size() == 48);
		CHECK(s->t0 == 1);
		REQUIRE(s->period_hint.has_value());
		CHECK(*s->period_hint == 24);
	}
	CHECK(set.wind48.unit == "m/s");
	CHECK(set.temp48.unit == "degC");
	CHECK(set.dni48.unit == "Wh/m^2");
	CHECK(&fixtures::by_name("temp48") == &set.temp48);
	CHECK_THROWS_AS(fixtures::by_name("rain48"), InvalidArgument);
	// Spot values from the digitized curves.
	CHECK(set.wind48.at_time(16) == 8.8);
	CHECK(set.temp48.at_time(11) == 19.4);
	CHECK(set.dni48.at_time(13) == 832.0);
}
