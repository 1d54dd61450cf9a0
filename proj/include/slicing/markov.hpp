#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "slicing/core.hpp"
#include "slicing/simulation.hpp"

namespace slicing::markov {

/// Row-stochastic matrix over the joint region index, stored as sparse rows
/// (each row has at most N + 1 non-zeros).
struct TransitionMatrix {
	std::vector<std::vector<std::pair<std::size_t, double>>> rows;

	std::size_t size() const { return rows.size(); }
	double at(std::size_t from, std::size_t to) const;
	/// Largest |row sum - 1|.
	double stochasticity_error() const;
	/// x Psi
	std::vector<double> left_multiply(const std::vector<double>& x) const;
};

/// Psi from a strategy and per-type queue-empty probabilities p_n(0).
///
/// From admissible state J, position i of the column leads to s + ds_{phi_i}
/// with probability prod_{k<i} p_{phi_k}(0) (1 - p_{phi_i}(0)); the walk ends
/// at the reserve entry. Mass for an infeasible target and all remaining mass
/// stay on the diagonal. Boundary states are absorbing.
TransitionMatrix build_transition_matrix(const Strategy& strategy, const RegionIndex& region,
                                         const std::vector<double>& empty_probs);

struct StateDistribution {
	std::vector<double> probs;
	std::size_t iterations = 0;
	bool converged = true;
	double last_change = 0.0;
};

/// Long-run (Cesaro) distribution of P_init Psi^k. Iterates the lazy chain
/// (I + Psi) / 2, whose limit is the Cesaro limit of Psi, until successive
/// iterates differ by less than `tol` in L1. `converged` is false when
/// max_iters ran out.
StateDistribution long_run_distribution(const TransitionMatrix& psi, const std::vector<double>& p_init,
                                        double tol = 1e-12, std::size_t max_iters = 1000000);

/// Point mass at the given joint index.
std::vector<double> point_mass(std::size_t size, std::size_t index);

/// mu_n = s-bar_n eta_n.
std::vector<double> estimate_acceptance_rates(const std::vector<double>& long_run, const RegionIndex& region,
                                              const std::vector<double>& release_rates);

struct QueueFigures {
	double arrival_rate = 0.0;     // lambda_n
	double mean_length = 0.0;      // L_n
	double mean_wait = 0.0;        // W_q,n
	double accept_prob = 0.0;      // P(A_n)
};

struct UtilityMetrics {
	double utility_rate = 0.0;    // u_Sigma-bar
	double mean_wait = 0.0;       // W_q-bar
	double admission = 0.0;       // P(A)-bar
	bool empty_queues = false;    // sum L_n = 0, mean wait reported as 0
};

/// Queue figures of one slice type served at acceptance rate mu. A patient
/// queue with lambda >= mu reports infinite length and wait.
QueueFigures queue_figures(const SliceTypeSpec& spec, double mu);

UtilityMetrics utility_metrics(const std::vector<double>& mu, const std::vector<double>& release_rates,
                               const std::vector<double>& utility_rates, const std::vector<QueueFigures>& queues);

/// u_Sigma(t) = sum_n s_n u_n.
double instant_utility(const SystemState& state, const std::vector<double>& utility_rates);

/// p_n(0) of each queue from the impatient queue model with the given
/// acceptance rates.
std::vector<double> empty_probabilities(const Scenario& scenario, const std::vector<double>& acceptance_rates);

struct AnalyticOptions {
	bool fixed_point = false;
	std::size_t max_rounds = 20;
	double damping = 0.5;
	double tol = 1e-12;
	std::size_t max_iters = 1000000;
};

/// "Embedded-chain approximation" of a strategy's long-run behavior.
struct AnalyticResult {
	std::vector<double> empty_probs;
	StateDistribution long_run;
	std::vector<double> mu;
	UtilityMetrics metrics;
	std::vector<QueueFigures> queues;
	std::size_t rounds = 0;
	bool fixed_point_converged = true;
};

/// Starts from `bootstrap_mu` (typically measured in a simulation run of the
/// same strategy) and optionally iterates mu -> p(0) -> Psi -> mu.
AnalyticResult analyze_strategy(const Scenario& scenario, const RegionIndex& region, const Strategy& strategy,
                                const std::vector<double>& bootstrap_mu, const AnalyticOptions& options = {});

enum class Evaluator { analytic, simulation };
enum class Objective { utility, wait, admission };

Evaluator parse_evaluator(const std::string& name);
Objective parse_objective(const std::string& name);

struct SearchConfig {
	std::size_t strategies = 10;
	sim::SimConfig sim;           // replications, horizon, seed, regime, initial state, threads
	Evaluator evaluator = Evaluator::simulation;
	Objective objective = Objective::utility;
	bool reserve_last = true;
};

struct SearchRow {
	std::string label;     // "random-<i>", "prefer1", "prefer2", "greedy_single_queue"
	bool benchmark = false;
	std::size_t strategy_id = 0;
	double utility_rate = 0.0;
	double mean_wait = 0.0;
	double admission = 0.0;
	double objective = 0.0; // larger is better (wait is negated)
};

struct SearchResult {
	std::vector<SearchRow> random;     // in generation order
	std::vector<SearchRow> benchmarks; // prefer1, prefer2, greedy_single_queue
	std::vector<std::size_t> ranking;  // indices into `random`, best first
	std::vector<Strategy> strategies;  // parallel to `random`

	const SearchRow& best() const { return random.at(ranking.at(0)); }
};

/// Random-sampling search with the three benchmark rows. Deterministic given
/// the master seed; every strategy sees the same replication seeds.
SearchResult strategy_search(const Scenario& scenario, const RegionIndex& region, const SearchConfig& config);

/// Number of distinct strategies for a region: ((N+1)!)^|A|.
double strategy_space_size(const RegionIndex& region);

/// Exhaustive enumeration, refused above |A| = 12 or 10^6 strategies.
/// Returns the best strategy under `score` (larger is better) and its score.
std::pair<Strategy, double> exhaustive_search(const RegionIndex& region,
                                              const std::function<double(const Strategy&)>& score,
                                              std::string fingerprint = {});

} // namespace slicing::markov
