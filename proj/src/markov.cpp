#include "slicing/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "slicing/error.hpp"
#include "slicing/queueing.hpp"

namespace slicing::markov {

double TransitionMatrix::at(std::size_t from, std::size_t to) const
{
	double v = 0.0;
	for (const auto& [j, p] : rows.at(from))
		if (j == to)
			v += p;
	return v;
}

double TransitionMatrix::stochasticity_error() const
{
	double worst = 0.0;
	for (const auto& row : rows) {
		double sum = 0.0;
		for (const auto& e : row)
			sum += e.second;
		worst = std::max(worst, std::abs(sum - 1.0));
	}
	return worst;
}

std::vector<double> TransitionMatrix::left_multiply(const std::vector<double>& x) const
{
	std::vector<double> y(rows.size(), 0.0);
	for (std::size_t i = 0; i < rows.size(); ++i) {
		if (x[i] == 0.0)
			continue;
		for (const auto& [j, p] : rows[i])
			y[j] += x[i] * p;
	}
	return y;
}

TransitionMatrix build_transition_matrix(const Strategy& strategy, const RegionIndex& region,
                                         const std::vector<double>& empty_probs)
{
	validate_strategy(strategy, region);
	if (empty_probs.size() != region.type_count())
		throw InvalidInput("one queue-empty probability per slice type is required");
	for (double p : empty_probs)
		if (!(p >= 0.0 && p <= 1.0))
			throw InvalidInput("queue-empty probabilities must lie in [0, 1]");

	TransitionMatrix psi;
	psi.rows.resize(region.size());
	for (std::size_t j = 0; j < region.size(); ++j) {
		auto& row = psi.rows[j];
		double stay = 1.0;
		if (j < region.admissible_count()) {
			const auto& s = region.index_to_state(j);
			double prefix = 1.0;
			double moved = 0.0;
			for (int entry : strategy.column(j).order) {
				if (entry == 0)
					break;
				const auto type = static_cast<std::size_t>(entry - 1);
				const double mass = prefix * (1.0 - empty_probs[type]);
				if (auto target = region.find(s.incremented(type)); target && mass > 0.0) {
					row.emplace_back(*target, mass);
					moved += mass;
				}
				prefix *= empty_probs[type];
			}
			stay = 1.0 - moved;
		}
		row.emplace_back(j, stay);
	}
	return psi;
}

std::vector<double> point_mass(std::size_t size, std::size_t index)
{
	std::vector<double> p(size, 0.0);
	p.at(index) = 1.0;
	return p;
}

StateDistribution long_run_distribution(const TransitionMatrix& psi, const std::vector<double>& p_init, double tol,
                                        std::size_t max_iters)
{
	if (p_init.size() != psi.size())
		throw InvalidInput("initial distribution does not match the transition matrix");
	const double total = std::accumulate(p_init.begin(), p_init.end(), 0.0);
	if (std::abs(total - 1.0) > 1e-9)
		throw InvalidInput("initial distribution must sum to 1");

	StateDistribution out;
	out.probs = p_init;
	out.converged = false;
	for (std::size_t it = 1; it <= max_iters; ++it) {
		auto next = psi.left_multiply(out.probs);
		double change = 0.0;
		for (std::size_t i = 0; i < next.size(); ++i) {
			next[i] = 0.5 * (next[i] + out.probs[i]);
			change += std::abs(next[i] - out.probs[i]);
		}
		out.probs = std::move(next);
		out.iterations = it;
		out.last_change = change;
		if (change < tol) {
			out.converged = true;
			break;
		}
	}
	const double sum = std::accumulate(out.probs.begin(), out.probs.end(), 0.0);
	for (double& p : out.probs)
		p /= sum;
	return out;
}

std::vector<double> estimate_acceptance_rates(const std::vector<double>& long_run, const RegionIndex& region,
                                              const std::vector<double>& release_rates)
{
	if (long_run.size() != region.size() || release_rates.size() != region.type_count())
		throw InvalidInput("estimate_acceptance_rates: dimension mismatch");
	std::vector<double> mu(region.type_count(), 0.0);
	for (std::size_t j = 0; j < long_run.size(); ++j) {
		const auto& s = region.index_to_state(j);
		for (std::size_t n = 0; n < mu.size(); ++n)
			mu[n] += long_run[j] * s[n];
	}
	for (std::size_t n = 0; n < mu.size(); ++n)
		mu[n] *= release_rates[n];
	return mu;
}

UtilityMetrics utility_metrics(const std::vector<double>& mu, const std::vector<double>& release_rates,
                               const std::vector<double>& utility_rates, const std::vector<QueueFigures>& queues)
{
	if (mu.size() != release_rates.size() || mu.size() != utility_rates.size())
		throw InvalidInput("utility_metrics: dimension mismatch");
	UtilityMetrics m;
	for (std::size_t n = 0; n < mu.size(); ++n)
		m.utility_rate += mu[n] * utility_rates[n] / release_rates[n];

	double length = 0.0, weighted_wait = 0.0, lambda = 0.0, admitted = 0.0;
	for (const auto& q : queues) {
		length += q.mean_length;
		weighted_wait += q.mean_length > 0.0 ? q.mean_wait * q.mean_length : 0.0;
		lambda += q.arrival_rate;
		admitted += q.arrival_rate * q.accept_prob;
	}
	if (length > 0.0) {
		m.mean_wait = std::isinf(length) ? std::numeric_limits<double>::infinity() : weighted_wait / length;
	} else {
		m.mean_wait = 0.0;
		m.empty_queues = true;
	}
	m.admission = lambda > 0.0 ? admitted / lambda : 0.0;
	return m;
}

double instant_utility(const SystemState& state, const std::vector<double>& utility_rates)
{
	if (state.size() != utility_rates.size())
		throw InvalidInput("instant_utility: dimension mismatch");
	double u = 0.0;
	for (std::size_t n = 0; n < state.size(); ++n)
		u += state[n] * utility_rates[n];
	return u;
}

namespace {

constexpr double min_rate = 1e-9;

queueing::QueueParams queue_params(const SliceTypeSpec& spec, double mu)
{
	return {spec.arrival_rate, std::max(mu, min_rate), spec.reneging_rate, spec.balking_exponent};
}

} // namespace

QueueFigures queue_figures(const SliceTypeSpec& spec, double mu)
{
	QueueFigures q;
	q.arrival_rate = spec.arrival_rate;
	try {
		const auto params = queue_params(spec, mu);
		const auto pmf = queueing::impatient_pmf(params);
		for (std::size_t l = 0; l < pmf.size(); ++l)
			q.mean_length += static_cast<double>(l) * pmf[l];
		const auto probs = queueing::join_accept_probs(params, {}, queueing::JoinModel::exogenous_service);
		q.accept_prob = probs.accept;
		const double joined = spec.arrival_rate * probs.join;
		q.mean_wait = joined > 0.0 ? q.mean_length / joined : 0.0;
	} catch (const DivergentQueue&) {
		q.mean_length = std::numeric_limits<double>::infinity();
		q.mean_wait = std::numeric_limits<double>::infinity();
		q.accept_prob = std::min(1.0, mu / spec.arrival_rate);
	}
	return q;
}

std::vector<double> empty_probabilities(const Scenario& scenario, const std::vector<double>& acceptance_rates)
{
	if (acceptance_rates.size() != scenario.type_count())
		throw InvalidInput("one acceptance rate per slice type is required");
	std::vector<double> p0(scenario.type_count(), 0.0);
	for (std::size_t n = 0; n < p0.size(); ++n) {
		try {
			p0[n] = queueing::impatient_pmf(queue_params(scenario.types[n], acceptance_rates[n])).front();
		} catch (const DivergentQueue&) {
			p0[n] = 0.0;
		}
	}
	return p0;
}

AnalyticResult analyze_strategy(const Scenario& scenario, const RegionIndex& region, const Strategy& strategy,
                                const std::vector<double>& bootstrap_mu, const AnalyticOptions& options)
{
	std::vector<double> eta, utility;
	for (const auto& t : scenario.types) {
		eta.push_back(t.release_rate);
		utility.push_back(t.utility_rate);
	}
	const auto start = point_mass(region.size(), region.state_to_index(SystemState::zero(scenario.type_count())));

	AnalyticResult out;
	std::vector<double> mu_hat = bootstrap_mu;
	const std::size_t rounds = options.fixed_point ? options.max_rounds : 1;
	out.fixed_point_converged = !options.fixed_point;
	for (std::size_t round = 1; round <= rounds; ++round) {
		out.rounds = round;
		out.empty_probs = empty_probabilities(scenario, mu_hat);
		const auto psi = build_transition_matrix(strategy, region, out.empty_probs);
		out.long_run = long_run_distribution(psi, start, options.tol, options.max_iters);
		out.mu = estimate_acceptance_rates(out.long_run.probs, region, eta);
		if (!options.fixed_point)
			break;
		double change = 0.0;
		for (std::size_t n = 0; n < mu_hat.size(); ++n) {
			const double next = (1.0 - options.damping) * mu_hat[n] + options.damping * out.mu[n];
			change = std::max(change, std::abs(next - mu_hat[n]) / std::max(1.0, std::abs(mu_hat[n])));
			mu_hat[n] = next;
		}
		if (change < 1e-6) {
			out.fixed_point_converged = true;
			break;
		}
	}
	out.queues.clear();
	for (std::size_t n = 0; n < scenario.type_count(); ++n)
		out.queues.push_back(queue_figures(scenario.types[n], out.mu[n]));
	out.metrics = utility_metrics(out.mu, eta, utility, out.queues);
	return out;
}

Evaluator parse_evaluator(const std::string& name)
{
	if (name == "analytic")
		return Evaluator::analytic;
	if (name == "simulation")
		return Evaluator::simulation;
	throw InvalidInput("unknown evaluator '" + name + "' (analytic|simulation)");
}

Objective parse_objective(const std::string& name)
{
	if (name == "utility")
		return Objective::utility;
	if (name == "wait")
		return Objective::wait;
	if (name == "admission")
		return Objective::admission;
	throw InvalidInput("unknown objective '" + name + "' (utility|wait|admission)");
}

namespace {

double objective_value(const SearchRow& row, Objective objective)
{
	switch (objective) {
	case Objective::utility:
		return row.utility_rate;
	case Objective::wait:
		return -row.mean_wait;
	case Objective::admission:
		return row.admission;
	}
	return 0.0;
}

SearchRow simulated_row(const sim::MonteCarloResult& mc)
{
	SearchRow row;
	row.utility_rate = mc.utility_rate.mean;
	row.mean_wait = mc.joined_wait.mean;
	row.admission = mc.admission.mean;
	return row;
}

SearchRow evaluate(const Scenario& scenario, const RegionIndex& region, const Strategy& strategy,
                   const SearchConfig& config)
{
	sim::SimConfig sc = config.sim;
	sc.threads = 1;
	if (config.evaluator == Evaluator::simulation)
		return simulated_row(sim::run_monte_carlo(scenario, region, &strategy, sc));

	// Bootstrap the acceptance rates from one replication.
	const auto run = sim::run_replication(scenario, region, strategy, sc, sim::replication_seed(sc.master_seed, 0));
	std::vector<double> mu;
	for (const auto& c : run.counts)
		mu.push_back(static_cast<double>(c.acceptances) / sc.horizon);
	const auto analytic = analyze_strategy(scenario, region, strategy, mu);
	SearchRow row;
	row.utility_rate = analytic.metrics.utility_rate;
	row.mean_wait = analytic.metrics.mean_wait;
	row.admission = analytic.metrics.admission;
	return row;
}

} // namespace

SearchResult strategy_search(const Scenario& scenario, const RegionIndex& region, const SearchConfig& config)
{
	if (config.strategies < 1)
		throw InvalidInput("strategy search needs at least one strategy");
	config.sim.validate();
	const auto fingerprint = scenario_fingerprint(scenario);
	const std::size_t n = scenario.type_count();

	SearchResult out;
	for (std::size_t i = 0; i < config.strategies; ++i) {
		Rng rng(derive_seed(config.sim.master_seed, {static_cast<std::uint64_t>(Stream::strategy), i}));
		out.strategies.push_back(random_strategy(region, rng, config.reserve_last, fingerprint));
	}

	std::vector<Strategy> naive;
	std::vector<std::string> labels;
	for (std::size_t first = 0; first < n && first < 2; ++first) {
		std::vector<int> order{static_cast<int>(first + 1)};
		for (std::size_t t = 0; t < n; ++t)
			if (t != first)
				order.push_back(static_cast<int>(t + 1));
		order.push_back(0);
		naive.push_back(naive_strategy(region, PreferenceVector(order), fingerprint));
		labels.push_back("prefer" + std::to_string(first + 1));
	}

	// Tasks: random strategies, naive strategies, then the greedy baseline.
	const std::size_t tasks = out.strategies.size() + naive.size() + 1;
	std::vector<SearchRow> rows(tasks);
	sim::parallel_for(tasks, config.sim.threads, [&](std::size_t i) {
		if (i < out.strategies.size()) {
			rows[i] = evaluate(scenario, region, out.strategies[i], config);
		} else if (i < out.strategies.size() + naive.size()) {
			rows[i] = evaluate(scenario, region, naive[i - out.strategies.size()], config);
		} else {
			sim::SimConfig sc = config.sim;
			sc.threads = 1;
			rows[i] = simulated_row(sim::run_monte_carlo(scenario, region, nullptr, sc));
		}
	});

	for (std::size_t i = 0; i < tasks; ++i) {
		auto& row = rows[i];
		row.objective = objective_value(row, config.objective);
		if (i < out.strategies.size()) {
			row.label = "random-" + std::to_string(i);
			row.strategy_id = i;
			out.random.push_back(row);
		} else if (i < out.strategies.size() + naive.size()) {
			row.label = labels[i - out.strategies.size()];
			row.benchmark = true;
			out.benchmarks.push_back(row);
		} else {
			row.label = "greedy_single_queue";
			row.benchmark = true;
			out.benchmarks.push_back(row);
		}
	}
	out.ranking.resize(out.random.size());
	std::iota(out.ranking.begin(), out.ranking.end(), 0);
	std::stable_sort(out.ranking.begin(), out.ranking.end(), [&](std::size_t a, std::size_t b) {
		return out.random[a].objective > out.random[b].objective;
	});
	return out;
}

double strategy_space_size(const RegionIndex& region)
{
	double perms = 1.0;
	for (std::size_t k = 2; k <= region.type_count() + 1; ++k)
		perms *= static_cast<double>(k);
	return std::pow(perms, static_cast<double>(region.admissible_count()));
}

std::pair<Strategy, double> exhaustive_search(const RegionIndex& region,
                                              const std::function<double(const Strategy&)>& score,
                                              std::string fingerprint)
{
	constexpr std::size_t max_admissible = 12;
	constexpr double max_strategies = 1e6;
	const double space = strategy_space_size(region);
	if (region.admissible_count() > max_admissible || space > max_strategies)
		throw InvalidInput("exhaustive search refused: " + std::to_string(region.admissible_count()) +
		                   " admissible states, " + std::to_string(space) + " strategies");

	std::vector<int> base(region.type_count() + 1);
	std::iota(base.begin(), base.end(), 0);
	std::vector<PreferenceVector> perms;
	do
		perms.emplace_back(base);
	while (std::next_permutation(base.begin(), base.end()));

	std::vector<std::size_t> digits(region.admissible_count(), 0);
	Strategy current;
	current.scenario_fingerprint = std::move(fingerprint);
	current.columns.assign(region.admissible_count(), perms.front());
	Strategy best = current;
	double best_score = score(current);
	for (;;) {
		std::size_t d = 0;
		while (d < digits.size() && ++digits[d] == perms.size()) {
			digits[d] = 0;
			current.columns[d] = perms[0];
			++d;
		}
		if (d == digits.size())
			break;
		current.columns[d] = perms[digits[d]];
		const double s = score(current);
		if (s > best_score) {
			best_score = s;
			best = current;
		}
	}
	return {best, best_score};
}

} // namespace slicing::markov
