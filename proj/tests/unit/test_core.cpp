#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "slicing/core.hpp"
#include "slicing/error.hpp"

using namespace slicing;

namespace {

Scenario one_resource(std::vector<double> costs, double capacity = 1.0)
{
	Scenario s;
	s.resources.values = {capacity};
	for (double c : costs) {
		SliceTypeSpec t;
		t.cost.values = {c};
		t.arrival_rate = 1.0;
		t.release_rate = 1.0;
		t.waiting_cost_rate = 1.0;
		t.profit_rate = 1.0;
		s.types.push_back(t);
	}
	return s;
}

} // namespace

TEST_CASE("assigned_resources")
{
	CHECK(assigned_resources(case_study_scenario(), SystemState({1, 2})).values[0] == doctest::Approx(1.0));
	const auto a = assigned_resources(table2_scenario(), SystemState({10, 10}));
	CHECK(a.values[0] == doctest::Approx(0.6));
	CHECK(a.values[1] == doctest::Approx(0.6));
	const auto z = assigned_resources(table2_scenario(), SystemState({0, 0}));
	CHECK(z.values == std::vector<double>{0.0, 0.0});
	CHECK_THROWS_AS(assigned_resources(table2_scenario(), SystemState({1, 2, 3})), InvalidInput);
}

TEST_CASE("is_feasible")
{
	const auto cs = case_study_scenario();
	CHECK(is_feasible(cs, SystemState({1, 2})));
	CHECK_FALSE(is_feasible(cs, SystemState({2, 0})));
	CHECK(is_feasible(cs, SystemState({0, 0})));
	// 0.05 * 20 is not exactly 1 in binary; the slack keeps it feasible.
	CHECK(is_feasible(table2_scenario(), SystemState({0, 20})));
	CHECK_FALSE(is_feasible(table2_scenario(), SystemState({0, 21})));
}

TEST_CASE("enumerate_regions on the case study")
{
	const auto region = enumerate_regions(case_study_scenario());
	CHECK(region.size() == 9);
	CHECK(region.admissible_count() == 7);
	CHECK_FALSE(region.is_admissible(SystemState({0, 5})));
	CHECK_FALSE(region.is_admissible(SystemState({1, 2})));
	CHECK(region.is_admissible(SystemState({1, 1})));
}

TEST_CASE("enumerate_regions on the two-type scenario matches a rational-arithmetic count")
{
	// Costs in hundredths: 1 s1 + 5 s2 <= 100 and 5 s1 + 1 s2 <= 100.
	auto fits = [](int a, int b) { return a + 5 * b <= 100 && 5 * a + b <= 100; };
	std::size_t feasible = 0, admissible = 0;
	for (int a = 0; a <= 100; ++a)
		for (int b = 0; b <= 100; ++b)
			if (fits(a, b)) {
				++feasible;
				admissible += fits(a + 1, b) || fits(a, b + 1);
			}
	const auto region = enumerate_regions(table2_scenario());
	CHECK(region.size() == feasible);
	CHECK(region.admissible_count() == admissible);
}

TEST_CASE("zero capacity and unbounded regions")
{
	const auto region = enumerate_regions(one_resource({0.5, 0.3}, 0.0));
	CHECK(region.size() == 1);
	CHECK(region.admissible_count() == 0);
	CHECK_THROWS_AS(enumerate_regions(one_resource({0.5, 0.0})), UnboundedRegion);
}

TEST_CASE("region properties")
{
	for (const auto& scenario : {case_study_scenario(), table2_scenario(), one_resource({0.5, 0.3, 0.2})}) {
		const auto region = enumerate_regions(scenario);
		const std::size_t n = scenario.type_count();
		std::set<SystemState> seen;
		for (std::size_t j = 0; j < region.size(); ++j) {
			const auto& s = region.index_to_state(j);
			CHECK(region.state_to_index(s) == j);
			CHECK(is_feasible(scenario, s));
			seen.insert(s);
			bool can_grow = false;
			for (std::size_t t = 0; t < n; ++t)
				if (region.contains(s.incremented(t))) {
					CHECK(is_feasible(scenario, s.incremented(t)));
					can_grow = true;
				}
			CHECK(region.is_admissible(s) == can_grow);
			CHECK((j < region.admissible_count()) == can_grow);
		}
		CHECK(seen.size() == region.size());
		CHECK(region.admissible_count() < region.size());
		CHECK(std::is_sorted(region.feasible().begin(), region.feasible().end()));
		CHECK(std::is_sorted(region.admissible().begin(), region.admissible().end()));
		CHECK_THROWS_AS(region.state_to_index(SystemState(std::vector<int>(n, 1000))), InvalidInput);
	}
}

TEST_CASE("region sizes are invariant under relabeling slice types")
{
	auto a = table2_scenario();
	auto b = a;
	std::swap(b.types[0], b.types[1]);
	CHECK(enumerate_regions(a).size() == enumerate_regions(b).size());
	CHECK(enumerate_regions(a).admissible_count() == enumerate_regions(b).admissible_count());
	auto c = one_resource({0.5, 0.3, 0.2});
	auto d = one_resource({0.2, 0.5, 0.3});
	CHECK(enumerate_regions(c).size() == enumerate_regions(d).size());
	CHECK(enumerate_regions(c).admissible_count() == enumerate_regions(d).admissible_count());
}

TEST_CASE("naive strategies")
{
	const auto region = enumerate_regions(case_study_scenario());
	const auto s = naive_strategy(region, PreferenceVector({2, 1, 0}));
	CHECK(s.columns.size() == region.admissible_count());
	for (const auto& c : s.columns)
		CHECK(c.order == std::vector<int>{2, 1, 0});
	validate_strategy(s, region);
	CHECK_THROWS_AS(naive_strategy(region, PreferenceVector({1, 1, 0})), InvalidInput);
}

TEST_CASE("random reserve-last strategies use both orders with probability one half")
{
	const auto region = enumerate_regions(table2_scenario());
	Rng rng(11);
	std::size_t first = 0, total = 0;
	for (int rep = 0; rep < 20; ++rep) {
		const auto s = random_strategy(region, rng, true);
		for (const auto& c : s.columns) {
			CHECK(c.order.back() == 0);
			first += c.order.front() == 1;
			++total;
		}
	}
	const double p = static_cast<double>(first) / total;
	CHECK(std::abs(p - 0.5) < 3.0 * std::sqrt(0.25 / total));
	Rng a(5), b(5);
	CHECK(random_strategy(region, a, true) == random_strategy(region, b, true));
}

TEST_CASE("random unrestricted columns are uniform over the six permutations (chi-square)")
{
	const auto region = enumerate_regions(case_study_scenario());
	Rng rng(3);
	std::map<std::vector<int>, std::size_t> counts;
	const std::size_t draws = 10000;
	std::size_t taken = 0;
	while (taken < draws) {
		const auto s = random_strategy(region, rng, false);
		for (const auto& c : s.columns) {
			if (taken == draws)
				break;
			++counts[c.order];
			++taken;
		}
	}
	CHECK(counts.size() == 6);
	const double expected = draws / 6.0;
	double chi2 = 0.0;
	for (const auto& [order, count] : counts) {
		chi2 += (count - expected) * (count - expected) / expected;
		CHECK(std::abs(count - expected) < 3.0 * std::sqrt(expected * (1.0 - 1.0 / 6.0)));
	}
	CHECK(chi2 < 20.52); // 99.9% quantile, 5 degrees of freedom
}

TEST_CASE("preference parsing and validation")
{
	CHECK(parse_preference("1,2,0").order == std::vector<int>{1, 2, 0});
	CHECK_THROWS_AS(parse_preference("1,x,0"), InvalidInput);
	CHECK(PreferenceVector({0, 1, 2}).is_valid(2));
	CHECK_FALSE(PreferenceVector({0, 1, 1}).is_valid(2));
	CHECK_FALSE(PreferenceVector({0, 1}).is_valid(2));
	const auto region = enumerate_regions(case_study_scenario());
	Strategy bad;
	bad.columns.assign(3, PreferenceVector({1, 2, 0}));
	CHECK_THROWS_AS(validate_strategy(bad, region), InvalidInput);
}

TEST_CASE("scenario and strategy JSON round trip")
{
	const auto sc = table2_scenario();
	const auto back = scenario_from_json(scenario_to_json(sc));
	CHECK(back.resources == sc.resources);
	REQUIRE(back.types.size() == 2);
	CHECK(back.types[1].release_rate == doctest::Approx(1.0 / 3.0));
	CHECK(back.types[0].balking_exponent == doctest::Approx(0.025));
	CHECK(scenario_fingerprint(back) == scenario_fingerprint(sc));

	const auto region = enumerate_regions(sc);
	Rng rng(9);
	const auto st = random_strategy(region, rng, true, scenario_fingerprint(sc));
	CHECK(strategy_from_json(strategy_to_json(st)) == st);

	auto j = scenario_to_json(sc);
	j["slice_types"][0].erase("cost");
	CHECK_THROWS_AS(scenario_from_json(j), InvalidInput);
	j = scenario_to_json(sc);
	j["slice_types"][0]["mean_lifetime"] = 0.0;
	CHECK_THROWS_AS(scenario_from_json(j), InvalidInput);
}

TEST_CASE("fingerprint covers the region-defining data only")
{
	auto a = table2_scenario();
	auto b = a;
	b.types[0].arrival_rate = 99.0;
	CHECK(scenario_fingerprint(a) == scenario_fingerprint(b));
	b.types[0].cost.values[0] = 0.02;
	CHECK(scenario_fingerprint(a) != scenario_fingerprint(b));
}

TEST_CASE("seed derivation")
{
	CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
	CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
	CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
	Rng r(1);
	double mean = 0.0;
	for (int i = 0; i < 100000; ++i)
		mean += r.exponential(2.0);
	CHECK(mean / 100000 == doctest::Approx(0.5).epsilon(0.02));
}
