#include "slicing/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "slicing/error.hpp"

namespace slicing {

namespace {

void require(bool ok, const std::string& what)
{
	if (!ok)
		throw InvalidInput(what);
}

} // namespace

void Scenario::validate() const
{
	require(resources.size() >= 1, "scenario: resource pool must have at least one resource");
	for (double r : resources.values)
		require(std::isfinite(r) && r >= 0.0, "scenario: resource amounts must be finite and non-negative");
	require(!types.empty(), "scenario: at least one slice type is required");
	for (std::size_t n = 0; n < types.size(); ++n) {
		const auto& t = types[n];
		const std::string id = "slice type " + std::to_string(n + 1);
		require(t.cost.size() == resources.size(), id + ": cost has " + std::to_string(t.cost.size()) +
		                                               " entries, pool has " + std::to_string(resources.size()));
		for (double c : t.cost.values)
			require(std::isfinite(c) && c >= 0.0, id + ": costs must be finite and non-negative");
		require(t.arrival_rate >= 0.0 && std::isfinite(t.arrival_rate), id + ": arrival_rate must be >= 0");
		require(t.release_rate > 0.0 && std::isfinite(t.release_rate), id + ": mean_lifetime must be > 0");
		require(t.profit_rate > 0.0, id + ": profit_rate must be > 0");
		require(t.issue_cost >= 0.0 && t.waiting_cost_rate >= 0.0 && t.utility_rate >= 0.0,
		        id + ": costs and utility rates must be >= 0");
		require(t.balking_exponent >= 0.0 && t.reneging_rate >= 0.0, id + ": balking/reneging parameters must be >= 0");
	}
}

ResourceVector assigned_resources(const std::vector<ResourceVector>& costs, const SystemState& state)
{
	if (costs.size() != state.size())
		throw InvalidInput("assigned_resources: " + std::to_string(costs.size()) + " cost columns but state has " +
		                   std::to_string(state.size()) + " entries");
	const std::size_t m_count = costs.empty() ? 0 : costs.front().size();
	ResourceVector a{std::vector<double>(m_count, 0.0)};
	for (std::size_t n = 0; n < costs.size(); ++n) {
		if (costs[n].size() != m_count)
			throw InvalidInput("assigned_resources: ragged cost matrix");
		if (state[n] < 0)
			throw InvalidInput("assigned_resources: negative slice count");
		for (std::size_t m = 0; m < m_count; ++m)
			a.values[m] += costs[n][m] * state[n];
	}
	return a;
}

ResourceVector assigned_resources(const Scenario& scenario, const SystemState& state)
{
	std::vector<ResourceVector> costs;
	costs.reserve(scenario.types.size());
	for (const auto& t : scenario.types)
		costs.push_back(t.cost);
	return assigned_resources(costs, state);
}

bool is_feasible(const Scenario& scenario, const SystemState& state)
{
	if (state.size() != scenario.type_count())
		throw InvalidInput("is_feasible: state dimension does not match slice type count");
	for (int c : state.counts)
		if (c < 0)
			return false;
	const auto a = assigned_resources(scenario, state);
	for (std::size_t m = 0; m < a.size(); ++m)
		if (scenario.resources[m] - a[m] < -feasibility_slack)
			return false;
	return true;
}

std::uint64_t RegionIndex::key(const SystemState& s) const
{
	std::uint64_t k = 0;
	for (std::size_t n = 0; n < type_count_; ++n) {
		if (s[n] < 0 || s[n] > bounds_[n])
			return std::numeric_limits<std::uint64_t>::max();
		k = k * static_cast<std::uint64_t>(bounds_[n] + 1) + static_cast<std::uint64_t>(s[n]);
	}
	return k;
}

std::optional<std::size_t> RegionIndex::find(const SystemState& s) const
{
	if (s.size() != type_count_)
		return std::nullopt;
	auto it = lookup_.find(key(s));
	if (it == lookup_.end())
		return std::nullopt;
	return it->second;
}

std::size_t RegionIndex::state_to_index(const SystemState& s) const
{
	auto j = find(s);
	if (!j)
		throw InvalidInput("state is outside the feasibility region");
	return *j;
}

RegionIndex enumerate_regions(const Scenario& scenario)
{
	scenario.validate();
	const std::size_t n_types = scenario.type_count();
	const std::size_t m_count = scenario.resource_count();

	RegionIndex region;
	region.type_count_ = n_types;
	region.bounds_.assign(n_types, 0);
	for (std::size_t n = 0; n < n_types; ++n) {
		const auto& c = scenario.types[n].cost;
		double bound = std::numeric_limits<double>::infinity();
		for (std::size_t m = 0; m < m_count; ++m)
			if (c[m] > 0.0)
				bound = std::min(bound, std::floor((scenario.resources[m] + feasibility_slack) / c[m]));
		if (!std::isfinite(bound))
			throw UnboundedRegion("slice type " + std::to_string(n + 1) + " has a zero cost vector; region is unbounded");
		region.bounds_[n] = static_cast<int>(bound);
	}

	// Depth-first walk in lexicographic order. Costs are non-negative, so once
	// s_n is infeasible every larger s_n is too.
	std::vector<int> counts(n_types, 0);
	std::vector<double> used(m_count, 0.0);
	auto fits = [&](std::size_t n) {
		for (std::size_t m = 0; m < m_count; ++m)
			if (scenario.resources[m] - (used[m] + scenario.types[n].cost[m]) < -feasibility_slack)
				return false;
		return true;
	};
	auto walk = [&](auto&& self, std::size_t n) -> void {
		if (n == n_types) {
			region.feasible_.emplace_back(counts);
			return;
		}
		for (;;) {
			self(self, n + 1);
			if (!fits(n))
				break;
			++counts[n];
			for (std::size_t m = 0; m < m_count; ++m)
				used[m] += scenario.types[n].cost[m];
		}
		for (std::size_t m = 0; m < m_count; ++m)
			used[m] -= scenario.types[n].cost[m] * counts[n];
		counts[n] = 0;
	};
	walk(walk, 0);

	std::vector<SystemState> boundary;
	for (const auto& s : region.feasible_) {
		bool admissible = false;
		for (std::size_t n = 0; n < n_types && !admissible; ++n)
			admissible = is_feasible(scenario, s.incremented(n));
		(admissible ? region.admissible_ : boundary).push_back(s);
	}
	region.by_index_ = region.admissible_;
	region.by_index_.insert(region.by_index_.end(), boundary.begin(), boundary.end());
	region.lookup_.reserve(region.by_index_.size() * 2);
	for (std::size_t j = 0; j < region.by_index_.size(); ++j)
		region.lookup_.emplace(region.key(region.by_index_[j]), j);
	return region;
}

bool PreferenceVector::is_valid(std::size_t n) const
{
	if (order.size() != n + 1)
		return false;
	std::vector<bool> seen(n + 1, false);
	for (int v : order) {
		if (v < 0 || static_cast<std::size_t>(v) > n || seen[static_cast<std::size_t>(v)])
			return false;
		seen[static_cast<std::size_t>(v)] = true;
	}
	return true;
}

std::string scenario_fingerprint(const Scenario& scenario)
{
	std::ostringstream canon;
	canon.precision(17);
	canon << "r";
	for (double r : scenario.resources.values)
		canon << ':' << r;
	for (const auto& t : scenario.types) {
		canon << "|c";
		for (double c : t.cost.values)
			canon << ':' << c;
	}
	// FNV-1a, 64 bit
	std::uint64_t h = 0xcbf29ce484222325ULL;
	for (unsigned char ch : canon.str()) {
		h ^= ch;
		h *= 0x100000001b3ULL;
	}
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
	return buf;
}

Strategy naive_strategy(const RegionIndex& region, const PreferenceVector& order, std::string fingerprint)
{
	if (!order.is_valid(region.type_count()))
		throw InvalidInput("naive_strategy: preference vector is not a permutation of {0..N}");
	return Strategy{std::move(fingerprint), std::vector<PreferenceVector>(region.admissible_count(), order)};
}

Strategy random_strategy(const RegionIndex& region, Rng& rng, bool reserve_last, std::string fingerprint)
{
	const auto n = static_cast<int>(region.type_count());
	Strategy strategy{std::move(fingerprint), {}};
	strategy.columns.reserve(region.admissible_count());
	for (std::size_t i = 0; i < region.admissible_count(); ++i) {
		std::vector<int> order;
		if (reserve_last) {
			order.resize(static_cast<std::size_t>(n));
			std::iota(order.begin(), order.end(), 1);
			rng.shuffle(order);
			order.push_back(0);
		} else {
			order.resize(static_cast<std::size_t>(n) + 1);
			std::iota(order.begin(), order.end(), 0);
			rng.shuffle(order);
		}
		strategy.columns.emplace_back(std::move(order));
	}
	return strategy;
}

void validate_strategy(const Strategy& strategy, const RegionIndex& region)
{
	if (strategy.columns.size() != region.admissible_count())
		throw InvalidInput("strategy has " + std::to_string(strategy.columns.size()) + " columns, region has " +
		                   std::to_string(region.admissible_count()) + " admissible states");
	for (std::size_t i = 0; i < strategy.columns.size(); ++i)
		if (!strategy.columns[i].is_valid(region.type_count()))
			throw InvalidInput("strategy column " + std::to_string(i) + " is not a permutation of {0..N}");
}

PreferenceVector parse_preference(const std::string& text)
{
	PreferenceVector pv;
	std::stringstream ss(text);
	std::string item;
	while (std::getline(ss, item, ',')) {
		try {
			std::size_t used = 0;
			pv.order.push_back(std::stoi(item, &used));
			if (used != item.size())
				throw InvalidInput("");
		} catch (const std::exception&) {
			throw InvalidInput("cannot parse preference vector '" + text + "'");
		}
	}
	return pv;
}

Scenario scenario_from_json(const nlohmann::json& j)
{
	try {
		Scenario s;
		s.resources.values = j.at("resources").get<std::vector<double>>();
		for (const auto& t : j.at("slice_types")) {
			SliceTypeSpec spec;
			spec.cost.values = t.at("cost").get<std::vector<double>>();
			spec.arrival_rate = t.at("arrival_rate").get<double>();
			const double lifetime = t.at("mean_lifetime").get<double>();
			if (!(lifetime > 0.0))
				throw InvalidInput("scenario: mean_lifetime must be > 0");
			spec.release_rate = 1.0 / lifetime;
			spec.issue_cost = t.value("issue_cost", 0.0);
			spec.waiting_cost_rate = t.at("waiting_cost_rate").get<double>();
			spec.profit_rate = t.at("profit_rate").get<double>();
			spec.utility_rate = t.value("utility_rate", spec.waiting_cost_rate);
			spec.balking_exponent = t.value("balking_exponent", 0.0);
			spec.reneging_rate = t.value("reneging_rate", 0.0);
			s.types.push_back(std::move(spec));
		}
		s.validate();
		return s;
	} catch (const nlohmann::json::exception& e) {
		throw InvalidInput(std::string("scenario file: ") + e.what());
	}
}

nlohmann::json scenario_to_json(const Scenario& scenario)
{
	nlohmann::json types = nlohmann::json::array();
	for (const auto& t : scenario.types)
		types.push_back({{"cost", t.cost.values},
		                 {"arrival_rate", t.arrival_rate},
		                 {"mean_lifetime", t.mean_lifetime()},
		                 {"issue_cost", t.issue_cost},
		                 {"waiting_cost_rate", t.waiting_cost_rate},
		                 {"profit_rate", t.profit_rate},
		                 {"utility_rate", t.utility_rate},
		                 {"balking_exponent", t.balking_exponent},
		                 {"reneging_rate", t.reneging_rate}});
	return {{"resources", scenario.resources.values}, {"slice_types", types}};
}

namespace {

nlohmann::json read_json(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw InvalidInput("cannot open " + path);
	try {
		return nlohmann::json::parse(in);
	} catch (const nlohmann::json::exception& e) {
		throw InvalidInput(path + ": " + e.what());
	}
}

} // namespace

Scenario load_scenario(const std::string& path) { return scenario_from_json(read_json(path)); }

Strategy strategy_from_json(const nlohmann::json& j)
{
	try {
		Strategy s;
		s.scenario_fingerprint = j.at("scenario_fingerprint").get<std::string>();
		for (const auto& col : j.at("columns"))
			s.columns.emplace_back(col.get<std::vector<int>>());
		return s;
	} catch (const nlohmann::json::exception& e) {
		throw InvalidInput(std::string("strategy file: ") + e.what());
	}
}

nlohmann::json strategy_to_json(const Strategy& strategy)
{
	nlohmann::json cols = nlohmann::json::array();
	for (const auto& c : strategy.columns)
		cols.push_back(c.order);
	return {{"scenario_fingerprint", strategy.scenario_fingerprint}, {"columns", cols}};
}

Strategy load_strategy(const std::string& path) { return strategy_from_json(read_json(path)); }

void save_json(const std::string& path, const nlohmann::json& j)
{
	std::ofstream out(path);
	if (!out)
		throw InvalidInput("cannot write " + path);
	out << j.dump(2) << '\n';
}

Scenario table2_scenario()
{
	auto make = [](std::vector<double> cost, double lambda, double lifetime, double u, double zeta) {
		SliceTypeSpec t;
		t.cost.values = std::move(cost);
		t.arrival_rate = lambda;
		t.release_rate = 1.0 / lifetime;
		t.issue_cost = 0.0;
		t.waiting_cost_rate = u;
		t.profit_rate = zeta;
		t.utility_rate = u;
		// Exponential balking exponent that rational tenants with Exp(eta)
		// lifetimes produce: beta = eta u / zeta.
		t.balking_exponent = t.release_rate * u / zeta;
		t.reneging_rate = 0.0;
		return t;
	};
	Scenario s;
	s.resources.values = {1.0, 1.0};
	s.types.push_back(make({0.01, 0.05}, 6.0, 5.0, 1.0, 8.0));
	s.types.push_back(make({0.05, 0.01}, 10.0, 3.0, 1.5, 12.0));
	return s;
}

Scenario case_study_scenario()
{
	auto make = [](double cost) {
		SliceTypeSpec t;
		t.cost.values = {cost};
		t.arrival_rate = 1.0;
		t.release_rate = 1.0;
		t.waiting_cost_rate = 1.0;
		t.profit_rate = 1.0;
		t.utility_rate = 1.0;
		return t;
	};
	Scenario s;
	s.resources.values = {1.0};
	s.types.push_back(make(0.6));
	s.types.push_back(make(0.2));
	return s;
}

} // namespace slicing
