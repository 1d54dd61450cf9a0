#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slicing/controller.hpp"
#include "slicing/core.hpp"
#include "slicing/queueing.hpp"
#include "slicing/stats.hpp"
#include "slicing/tenant.hpp"

namespace slicing::sim {

enum class InitialState { empty, random_feasible, random_full };

InitialState parse_initial_state(const std::string& name);
const char* to_string(InitialState s);

struct SimConfig {
	double horizon = 1000.0;          // periods
	std::size_t replications = 1;
	std::uint64_t master_seed = 1;
	std::optional<std::size_t> queue_cap;
	tenant::KnowledgeRegime regime;
	InitialState initial = InitialState::empty;
	double warmup_fraction = 0.0;     // excluded from time-averaged metrics
	bool trace = false;
	std::size_t threads = 1;

	void validate() const;
};

enum class RequestFate { accepted, reneged, balked, cap_rejected, waiting };

const char* to_string(RequestFate f);

struct RequestRecord {
	std::uint64_t id = 0;
	std::size_t slice_type = 0;
	double arrival_time = 0.0;
	double lifetime = 0.0;
	double wait = 0.0;          // censored at the horizon for `waiting`
	std::size_t entry_length = 0;
	RequestFate fate = RequestFate::waiting;
	double end_profit = 0.0;    // accepted and reneged only

	/// Issued and resolved: counts towards profit summaries.
	bool issued() const { return fate == RequestFate::accepted || fate == RequestFate::reneged; }
};

struct TypeCounts {
	std::size_t arrivals = 0;
	std::size_t balks = 0;
	std::size_t reneges = 0;
	std::size_t acceptances = 0;
	std::size_t cap_rejections = 0;
	std::size_t waiting = 0; // still queued at the horizon
};

struct TraceEvent {
	double time = 0.0;
	std::string kind; // request | accept | release | balk | renege | cap_reject
	std::size_t slice_type = 0;
	std::uint64_t request_id = 0;
	std::vector<std::size_t> queue_lengths;
	std::vector<int> state;
};

struct RunMetrics {
	std::uint64_t seed = 0;
	double horizon = 0.0;
	double measured_time = 0.0;                      // horizon minus warmup
	std::vector<TypeCounts> counts;                  // per slice type
	std::vector<std::vector<double>> acceptance_times; // per slice type
	std::vector<RequestRecord> requests;
	std::vector<double> occupancy;                   // time per joint region index
	double utility_integral = 0.0;                   // int sum_n s_n u_n dt
	std::vector<double> queue_length_integral;       // per controller queue
	std::vector<double> max_assigned;                // per resource
	std::vector<TraceEvent> trace;

	double mean_utility_rate() const { return measured_time > 0.0 ? utility_integral / measured_time : 0.0; }
	/// Mean wait of requests that joined a queue (accepted or reneged).
	double mean_joined_wait() const;
	/// accepted / arrivals over all types.
	double admission_rate() const;
	/// Time-averaged s_n.
	std::vector<double> mean_active(const RegionIndex& region) const;
	std::vector<double> end_profits(std::size_t slice_type) const;
	std::vector<double> renege_waits(std::size_t slice_type) const;
};

/// Checks arrivals = balks + reneges + acceptances + cap rejections + waiting.
bool conserves(const RunMetrics& m);

/// Multi-queue controller driven by `strategy`. Throws InvalidInput when the
/// strategy does not belong to the scenario.
RunMetrics run_replication(const Scenario& scenario, const RegionIndex& region, const Strategy& strategy,
                           const SimConfig& config, std::uint64_t seed);

/// One mixed FIFO, head admitted whenever it fits.
RunMetrics greedy_single_queue_baseline(const Scenario& scenario, const RegionIndex& region, const SimConfig& config,
                                        std::uint64_t seed);

/// Replication r runs with derive_seed(master_seed, r), independent of the
/// strategy, so competing strategies see common random numbers.
std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t replication);

struct MonteCarloResult {
	std::vector<RunMetrics> runs;
	stats::MeanSe utility_rate;
	stats::MeanSe joined_wait;
	stats::MeanSe admission;
	std::vector<stats::MeanSe> total_profit;   // per type
	std::vector<stats::MeanSe> mean_profit;    // per type
	std::vector<stats::MeanSe> profit_chance;  // per type
};

/// `strategy == nullptr` runs the greedy single-queue baseline.
MonteCarloResult run_monte_carlo(const Scenario& scenario, const RegionIndex& region, const Strategy* strategy,
                                 const SimConfig& config);

MonteCarloResult aggregate(std::vector<RunMetrics> runs, std::size_t type_count);

/// Single queue with exogenous Poisson acceptances (mu), exponential patience
/// (alpha) and balking: an arrival that finds l waiting joins with
/// probability delta^{l+1}.
struct IsolatedQueueResult {
	std::vector<double> occupancy; // fraction of time at each length
	double total_time = 0.0;
	std::size_t events = 0;
	std::size_t arrivals = 0;
	std::size_t joined = 0;
	std::size_t accepted = 0;
	std::size_t reneged = 0;
	std::size_t balked = 0;
	std::vector<double> accepted_waits;
	std::vector<double> reneged_waits;
	double mean_length = 0.0;

	double mean_joined_wait() const;
};

/// Runs until `horizon` time units or `max_events` transitions, whichever
/// comes first.
IsolatedQueueResult isolated_queue_sim(const queueing::QueueParams& params, double horizon, std::uint64_t seed,
                                       std::size_t max_events = static_cast<std::size_t>(-1));

/// Runs body(i) for i in [0, n) on up to `threads` workers. The first
/// exception thrown by any task is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

/// Draws an initial state for a replication.
SystemState draw_initial_state(const RegionIndex& region, InitialState kind, Rng& rng);

} // namespace slicing::sim
