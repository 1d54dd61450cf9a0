#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "slicing/rng.hpp"

namespace slicing {

/// Absolute slack on r_m - a_m when testing feasibility. Decimal costs such as
/// 0.01 and 0.05 do not sum exactly in binary.
inline constexpr double feasibility_slack = 1e-9;

/// Amounts of the M resource kinds, in normalized units.
struct ResourceVector {
	std::vector<double> values;

	std::size_t size() const { return values.size(); }
	double operator[](std::size_t m) const { return values[m]; }
	bool operator==(const ResourceVector&) const = default;
};

struct SliceTypeSpec {
	ResourceVector cost;          // c_n
	double arrival_rate = 0.0;    // lambda_n per period
	double release_rate = 0.0;    // eta_n per period, mean lifetime 1/eta_n
	double issue_cost = 0.0;      // u0, paid once when issuing
	double waiting_cost_rate = 0.0; // u, per period spent in queue
	double profit_rate = 0.0;     // zeta, per period of slice lifetime
	double utility_rate = 0.0;    // MNO-side utility per active slice per period
	double balking_exponent = 0.0; // beta_n
	double reneging_rate = 0.0;   // alpha_n

	double mean_lifetime() const { return 1.0 / release_rate; }
};

/// Resource pool plus slice-type catalog.
struct Scenario {
	ResourceVector resources;
	std::vector<SliceTypeSpec> types;

	std::size_t resource_count() const { return resources.size(); }
	std::size_t type_count() const { return types.size(); }

	/// Throws InvalidInput on any violated invariant.
	void validate() const;
};

/// Active-slice counts s, one entry per slice type.
struct SystemState {
	std::vector<int> counts;

	SystemState() = default;
	explicit SystemState(std::vector<int> c) : counts(std::move(c)) {}
	static SystemState zero(std::size_t n) { return SystemState(std::vector<int>(n, 0)); }

	std::size_t size() const { return counts.size(); }
	int operator[](std::size_t n) const { return counts[n]; }
	int& operator[](std::size_t n) { return counts[n]; }

	/// s + delta_s_n
	SystemState incremented(std::size_t n) const
	{
		SystemState s = *this;
		++s.counts[n];
		return s;
	}

	auto operator<=>(const SystemState&) const = default;
};

/// a = C s. Throws InvalidInput on dimension mismatch.
ResourceVector assigned_resources(const std::vector<ResourceVector>& costs, const SystemState& state);
ResourceVector assigned_resources(const Scenario& scenario, const SystemState& state);

bool is_feasible(const Scenario& scenario, const SystemState& state);

/// Feasibility region S and admissibility region A with a joint index J.
///
/// Both regions are kept in lexicographic order on (s_1, ..., s_N). The joint
/// index numbers admissible states first (0 .. |A|-1, in the order of A) and
/// the boundary states S \ A after them, so that J restricted to A coincides
/// with the admissible index used by strategy columns.
class RegionIndex {
public:
	RegionIndex() = default;

	const std::vector<SystemState>& feasible() const { return feasible_; }
	const std::vector<SystemState>& admissible() const { return admissible_; }
	std::size_t type_count() const { return type_count_; }

	std::size_t size() const { return by_index_.size(); }
	std::size_t admissible_count() const { return admissible_.size(); }

	bool contains(const SystemState& s) const { return find(s).has_value(); }
	bool is_admissible(const SystemState& s) const
	{
		auto j = find(s);
		return j && *j < admissible_.size();
	}

	std::optional<std::size_t> find(const SystemState& s) const;
	/// Joint index J(s); throws InvalidInput for states outside S.
	std::size_t state_to_index(const SystemState& s) const;
	const SystemState& index_to_state(std::size_t j) const { return by_index_.at(j); }

	/// Boundary states S \ A.
	std::vector<SystemState> saturated() const
	{
		return {by_index_.begin() + static_cast<std::ptrdiff_t>(admissible_.size()), by_index_.end()};
	}

	/// Upper bound on s_n over S.
	const std::vector<int>& bounds() const { return bounds_; }

private:
	friend RegionIndex enumerate_regions(const Scenario& scenario);

	std::uint64_t key(const SystemState& s) const;

	std::size_t type_count_ = 0;
	std::vector<int> bounds_;
	std::vector<SystemState> feasible_;
	std::vector<SystemState> admissible_;
	std::vector<SystemState> by_index_;
	std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

/// Throws UnboundedRegion when some slice type has an all-zero cost vector.
RegionIndex enumerate_regions(const Scenario& scenario);

/// A permutation of {0, 1, ..., N}. Entry n > 0 names slice type n (1-based);
/// 0 means "reserve": every type listed after it is never served.
struct PreferenceVector {
	std::vector<int> order;

	PreferenceVector() = default;
	explicit PreferenceVector(std::vector<int> o) : order(std::move(o)) {}

	std::size_t type_count() const { return order.empty() ? 0 : order.size() - 1; }
	bool is_valid(std::size_t n) const;
	bool operator==(const PreferenceVector&) const = default;
};

/// Preference matrix Phi: one column per admissible state, indexed by the
/// admissible index of the region it was built for.
struct Strategy {
	std::string scenario_fingerprint;
	std::vector<PreferenceVector> columns;

	const PreferenceVector& column(std::size_t admissible_index) const { return columns.at(admissible_index); }
	bool operator==(const Strategy&) const = default;
};

/// Stable hash of the region-defining part of a scenario (pool and costs).
std::string scenario_fingerprint(const Scenario& scenario);

Strategy naive_strategy(const RegionIndex& region, const PreferenceVector& order, std::string fingerprint = {});
Strategy random_strategy(const RegionIndex& region, Rng& rng, bool reserve_last, std::string fingerprint = {});

/// Checks column count and that every column is a permutation of {0..N}.
void validate_strategy(const Strategy& strategy, const RegionIndex& region);

/// Parses "1,2,0" into a preference vector.
PreferenceVector parse_preference(const std::string& text);

// Scenario and strategy files.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::string& path);

Strategy strategy_from_json(const nlohmann::json& j);
nlohmann::json strategy_to_json(const Strategy& strategy);
Strategy load_strategy(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& j);

/// Scenario of the two-type evaluation campaign: r = [1, 1], two slice types
/// with costs [0.01, 0.05] and [0.05, 0.01].
Scenario table2_scenario();
/// One resource, r = [1], c_1 = [0.6], c_2 = [0.2]; rates are placeholders.
Scenario case_study_scenario();

} // namespace slicing
