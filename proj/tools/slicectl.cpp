// slicectl: command-line front end for the slicing library.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "slicing/core.hpp"
#include "slicing/error.hpp"
#include "slicing/experiments.hpp"
#include "slicing/markov.hpp"
#include "slicing/queueing.hpp"
#include "slicing/simulation.hpp"
#include "slicing/stats.hpp"
#include "slicing/tenant.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace slicing;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid = 2;
constexpr int exit_numeric = 3;

struct GlobalOptions {
	std::uint64_t seed = 1;
	std::size_t threads = 1;
	std::string out;
	double scale = 1.0;
	bool force = false;
};

/// "table2" and "case_study" name the built-in scenarios; anything else is a path.
Scenario resolve_scenario(const std::string& name)
{
	if (name == "table2")
		return table2_scenario();
	if (name == "case_study")
		return case_study_scenario();
	return load_scenario(name);
}

json number_or_null(double v)
{
	if (std::isfinite(v))
		return v;
	return nullptr;
}

void emit(const json& j, const GlobalOptions& g, const std::string& file_name)
{
	std::cout << j.dump(2) << '\n';
	if (g.out.empty())
		return;
	exp::prepare_output_dir(g.out, g.force);
	save_json((fs::path(g.out) / file_name).string(), j);
}

Strategy resolve_strategy(const std::string& spec, const Scenario& scenario, const RegionIndex& region,
                          std::uint64_t seed)
{
	const auto fingerprint = scenario_fingerprint(scenario);
	if (spec.rfind("naive:", 0) == 0)
		return naive_strategy(region, parse_preference(spec.substr(6)), fingerprint);
	if (spec == "random") {
		Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::strategy)}));
		return random_strategy(region, rng, true, fingerprint);
	}
	auto s = load_strategy(spec);
	if (s.scenario_fingerprint != fingerprint)
		throw InvalidInput("strategy fingerprint " + s.scenario_fingerprint + " does not match scenario " +
		                   fingerprint);
	validate_strategy(s, region);
	return s;
}

// regions

struct RegionsArgs {
	std::string scenario = "table2";
	bool dump = false;
};

int cmd_regions(const RegionsArgs& a, const GlobalOptions& g)
{
	const auto scenario = resolve_scenario(a.scenario);
	const auto region = enumerate_regions(scenario);
	json j{{"feasible", region.size()},
	       {"admissible", region.admissible_count()},
	       {"saturated", region.size() - region.admissible_count()},
	       {"scenario_fingerprint", scenario_fingerprint(scenario)}};
	if (a.dump) {
		j["admissible_states"] = json::array();
		for (const auto& s : region.admissible())
			j["admissible_states"].push_back(s.counts);
		j["saturated_states"] = json::array();
		for (const auto& s : region.saturated())
			j["saturated_states"].push_back(s.counts);
	}
	emit(j, g, "regions.json");
	return exit_ok;
}

// analyze

struct AnalyzeArgs {
	queueing::QueueParams params{1.0, 1.0, 0.0, 0.0};
	std::size_t pmf_terms = 20;
	std::string model = "exogenous";
};

int cmd_analyze(const AnalyzeArgs& a, const GlobalOptions& g)
{
	const auto& p = a.params;
	p.validate();
	queueing::JoinModel model;
	if (a.model == "exogenous")
		model = queueing::JoinModel::exogenous_service;
	else if (a.model == "as_printed")
		model = queueing::JoinModel::as_printed;
	else
		throw InvalidInput("unknown join model '" + a.model + "' (exogenous|as_printed)");

	const auto pmf = queueing::impatient_pmf(p);
	const auto probs = queueing::join_accept_probs(p, {}, model);
	double mean_length = 0.0;
	for (std::size_t l = 0; l < pmf.size(); ++l)
		mean_length += static_cast<double>(l) * pmf[l];

	json j;
	j["params"] = {{"lambda", p.arrival_rate}, {"mu", p.service_rate}, {"alpha", p.reneging_rate},
	               {"beta", p.balking_exponent}};
	j["join_model"] = a.model;
	j["pmf"] = std::vector<double>(pmf.begin(), pmf.begin() + static_cast<std::ptrdiff_t>(std::min(a.pmf_terms, pmf.size())));
	j["pmf_support"] = pmf.size();
	j["mean_length"] = mean_length;
	j["P_J"] = probs.join;
	j["P_A"] = probs.accept;
	j["P_A_given_J"] = probs.accept_given_join;
	j["degenerate"] = probs.degenerate;
	if (p.reneging_rate > 0.0) {
		const auto wd = queueing::wait_densities(p);
		j["W_a"] = wd.mean_accepted();
		j["W_r"] = wd.mean_reneged();
		j["W_q"] = wd.mean_queued();
	} else {
		// No reneging: every joined request is accepted, W by Little's law.
		const double w = probs.join > 0.0 ? mean_length / (p.arrival_rate * probs.join) : 0.0;
		j["W_a"] = w;
		j["W_r"] = nullptr;
		j["W_q"] = w;
	}
	emit(j, g, "analyze.json");
	return exit_ok;
}

// simulate

struct SimulateArgs {
	std::string scenario = "table2";
	std::string strategy = "random";
	double horizon = 1000.0;
	std::size_t replications = 1;
	std::string knowledge = "patient";
	double risk_factor = 0.01;
	std::size_t delta_k = 2;
	std::size_t queue_cap = 0;
	std::string initial = "empty";
	double warmup = 0.0;
	bool trace = false;
};

int cmd_simulate(const SimulateArgs& a, const GlobalOptions& g)
{
	const auto scenario = resolve_scenario(a.scenario);
	const auto region = enumerate_regions(scenario);
	sim::SimConfig cfg;
	cfg.horizon = a.horizon;
	cfg.replications = a.replications;
	cfg.master_seed = g.seed;
	if (a.queue_cap > 0)
		cfg.queue_cap = a.queue_cap;
	cfg.regime = tenant::parse_regime(a.knowledge, a.risk_factor, a.delta_k);
	cfg.initial = sim::parse_initial_state(a.initial);
	cfg.warmup_fraction = a.warmup;
	cfg.trace = a.trace;
	cfg.threads = g.threads;
	cfg.validate();

	const bool greedy = a.strategy == "greedy";
	Strategy strategy;
	if (!greedy)
		strategy = resolve_strategy(a.strategy, scenario, region, g.seed);
	const auto mc = sim::run_monte_carlo(scenario, region, greedy ? nullptr : &strategy, cfg);

	exp::prepare_output_dir(g.out, g.force);
	const fs::path dir = g.out;
	const std::size_t n = scenario.type_count();

	std::vector<std::string> header{"replication", "seed", "utility_rate", "mean_joined_wait", "admission_rate"};
	for (std::size_t t = 1; t <= n; ++t)
		for (const char* c : {"arrivals", "balks", "reneges", "acceptances", "cap_rejections", "waiting"})
			header.push_back(std::string(c) + "_type" + std::to_string(t));
	exp::CsvWriter metrics(dir / "metrics.csv", header);
	exp::CsvWriter requests(dir / "requests.csv", {"replication", "request_id", "slice_type", "arrival_time",
	                                               "lifetime", "wait", "entry_length", "fate", "end_profit"});
	std::ofstream events;
	if (a.trace)
		events.open(dir / "events.jsonl");

	for (std::size_t r = 0; r < mc.runs.size(); ++r) {
		const auto& run = mc.runs[r];
		std::vector<std::string> row{std::to_string(r), std::to_string(run.seed),
		                             exp::format_number(run.mean_utility_rate()),
		                             exp::format_number(run.mean_joined_wait()),
		                             exp::format_number(run.admission_rate())};
		for (const auto& c : run.counts)
			for (std::size_t v : {c.arrivals, c.balks, c.reneges, c.acceptances, c.cap_rejections, c.waiting})
				row.push_back(std::to_string(v));
		metrics.row(row);
		for (const auto& q : run.requests)
			requests.row({std::to_string(r), std::to_string(q.id), std::to_string(q.slice_type + 1),
			              exp::format_number(q.arrival_time), exp::format_number(q.lifetime),
			              exp::format_number(q.wait), std::to_string(q.entry_length), sim::to_string(q.fate),
			              q.issued() ? exp::format_number(q.end_profit) : ""});
		for (const auto& e : run.trace) {
			json ev{{"replication", r},
			        {"time", e.time},
			        {"kind", e.kind},
			        {"slice_type", e.slice_type + 1},
			        {"request_id", e.request_id},
			        {"queue_lengths", e.queue_lengths},
			        {"state", e.state}};
			events << ev.dump() << '\n';
		}
	}

	json summary{{"replications", mc.runs.size()},
	             {"strategy", a.strategy},
	             {"knowledge", cfg.regime.name()},
	             {"utility_rate", {{"mean", mc.utility_rate.mean}, {"se", mc.utility_rate.se}}},
	             {"mean_joined_wait", {{"mean", mc.joined_wait.mean}, {"se", mc.joined_wait.se}}},
	             {"admission_rate", {{"mean", mc.admission.mean}, {"se", mc.admission.se}}}};
	json per_type = json::array();
	for (std::size_t t = 0; t < n; ++t)
		per_type.push_back({{"slice_type", t + 1},
		                    {"total_profit", mc.total_profit[t].mean},
		                    {"mean_profit", mc.mean_profit[t].mean},
		                    {"profiting_chance", mc.profit_chance[t].mean}});
	summary["types"] = per_type;
	std::cout << summary.dump(2) << '\n';
	return exit_ok;
}

// fit

struct FitArgs {
	std::string input;
	std::string column;
	std::string distribution = "exponential";
	std::vector<std::string> where;
	bool gaps = false;
	double period = 1.0;
};

std::vector<std::string> split_csv_line(const std::string& line)
{
	std::vector<std::string> cells;
	std::string cell;
	bool quoted = false;
	for (std::size_t i = 0; i < line.size(); ++i) {
		const char c = line[i];
		if (quoted) {
			if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
				cell += '"';
				++i;
			} else if (c == '"') {
				quoted = false;
			} else {
				cell += c;
			}
		} else if (c == '"') {
			quoted = true;
		} else if (c == ',') {
			cells.push_back(cell);
			cell.clear();
		} else if (c != '\r') {
			cell += c;
		}
	}
	cells.push_back(cell);
	return cells;
}

int cmd_fit(const FitArgs& a, const GlobalOptions& g)
{
	std::ifstream in(a.input);
	if (!in)
		throw InvalidInput("cannot read " + a.input);
	std::string line;
	if (!std::getline(in, line))
		throw InvalidInput(a.input + " is empty");
	const auto header = split_csv_line(line);
	auto column_index = [&](const std::string& name) {
		auto it = std::find(header.begin(), header.end(), name);
		if (it == header.end())
			throw InvalidInput("column '" + name + "' not found in " + a.input);
		return static_cast<std::size_t>(it - header.begin());
	};
	const std::size_t col = column_index(a.column);
	std::vector<std::pair<std::size_t, std::string>> filters;
	for (const auto& w : a.where) {
		const auto eq = w.find('=');
		if (eq == std::string::npos)
			throw InvalidInput("--where expects COLUMN=VALUE, got '" + w + "'");
		filters.emplace_back(column_index(w.substr(0, eq)), w.substr(eq + 1));
	}

	std::vector<double> values;
	while (std::getline(in, line)) {
		if (line.empty())
			continue;
		const auto cells = split_csv_line(line);
		if (cells.size() != header.size())
			throw InvalidInput("ragged row in " + a.input);
		bool keep = true;
		for (const auto& [c, v] : filters)
			keep = keep && cells[c] == v;
		if (!keep || cells[col].empty())
			continue;
		try {
			values.push_back(std::stod(cells[col]));
		} catch (const std::exception&) {
			throw InvalidInput("non-numeric value '" + cells[col] + "' in column " + a.column);
		}
	}

	json j{{"input", a.input}, {"column", a.column}, {"distribution", a.distribution}};
	stats::FitResult fit;
	if (a.distribution == "geometric") {
		std::vector<std::int64_t> samples;
		if (a.gaps) {
			samples = stats::binned_gaps(values, a.period);
		} else {
			for (double v : values) {
				if (v < 0.0 || v != std::floor(v))
					throw InvalidInput("geometric samples must be non-negative integers");
				samples.push_back(static_cast<std::int64_t>(v));
			}
		}
		if (samples.empty())
			throw InvalidInput("no samples selected");
		fit = stats::fit_geometric(samples);
		j["kld"] = number_or_null(fit.kld);
		j["success"] = stats::fit_success(fit);
	} else if (a.distribution == "exponential") {
		fit = stats::fit_exponential(values);
		j["tail_diagnostic"] = fit.tail_diagnostic;
		j["fat_tail"] = fit.fat_tail;
	} else {
		throw InvalidInput("unknown distribution '" + a.distribution + "' (geometric|exponential)");
	}
	j["n"] = fit.n;
	j["parameter"] = number_or_null(fit.parameter);
	j["converged"] = fit.converged;
	j["degenerate"] = fit.degenerate;
	j["log_likelihood"] = number_or_null(fit.log_likelihood);
	emit(j, g, "fit.json");
	return exit_ok;
}

// markov

struct MarkovArgs {
	std::string scenario = "table2";
	std::string strategy = "random";
	std::string empty_probs = "simulate";
	std::string knowledge = "patient";
	double bootstrap_horizon = 1000.0;
	bool fixed_point = false;
	std::size_t top = 10;
};

std::vector<double> parse_list(const std::string& text)
{
	std::vector<double> out;
	std::stringstream ss(text);
	std::string item;
	while (std::getline(ss, item, ',')) {
		try {
			out.push_back(std::stod(item));
		} catch (const std::exception&) {
			throw InvalidInput("bad number '" + item + "' in list '" + text + "'");
		}
	}
	return out;
}

json queue_json(const markov::QueueFigures& q)
{
	return {{"arrival_rate", q.arrival_rate},
	        {"mean_length", number_or_null(q.mean_length)},
	        {"mean_wait", number_or_null(q.mean_wait)},
	        {"accept_prob", q.accept_prob}};
}

int cmd_markov(const MarkovArgs& a, const GlobalOptions& g)
{
	const auto scenario = resolve_scenario(a.scenario);
	const auto region = enumerate_regions(scenario);
	const auto strategy = resolve_strategy(a.strategy, scenario, region, g.seed);
	std::vector<double> eta, utility;
	for (const auto& t : scenario.types) {
		eta.push_back(t.release_rate);
		utility.push_back(t.utility_rate);
	}

	json j;
	j["method"] = "embedded-chain approximation";
	std::vector<double> empty;
	markov::StateDistribution dist;
	std::vector<double> mu;
	if (a.empty_probs == "simulate") {
		sim::SimConfig cfg;
		cfg.horizon = a.bootstrap_horizon;
		cfg.master_seed = g.seed;
		cfg.regime = tenant::parse_regime(a.knowledge);
		const auto run = sim::run_replication(scenario, region, strategy, cfg, sim::replication_seed(g.seed, 0));
		std::vector<double> boot;
		for (const auto& c : run.counts)
			boot.push_back(static_cast<double>(c.acceptances) / cfg.horizon);
		markov::AnalyticOptions opt;
		opt.fixed_point = a.fixed_point;
		const auto res = markov::analyze_strategy(scenario, region, strategy, boot, opt);
		empty = res.empty_probs;
		dist = res.long_run;
		mu = res.mu;
		j["bootstrap_mu"] = boot;
		j["fixed_point_rounds"] = res.rounds;
		j["fixed_point_converged"] = res.fixed_point_converged;
	} else {
		empty = parse_list(a.empty_probs);
		if (empty.size() != scenario.type_count())
			throw InvalidInput("--empty-probs needs one value per slice type");
		for (double p : empty)
			if (!(p >= 0.0 && p <= 1.0))
				throw InvalidInput("empty probabilities must lie in [0, 1]");
		const auto psi = markov::build_transition_matrix(strategy, region, empty);
		const auto start = markov::point_mass(region.size(), region.state_to_index(SystemState::zero(scenario.type_count())));
		dist = markov::long_run_distribution(psi, start);
		mu = markov::estimate_acceptance_rates(dist.probs, region, eta);
	}

	std::vector<markov::QueueFigures> queues;
	for (std::size_t n = 0; n < scenario.type_count(); ++n)
		queues.push_back(markov::queue_figures(scenario.types[n], mu[n]));
	const auto metrics = markov::utility_metrics(mu, eta, utility, queues);

	std::vector<std::size_t> order(dist.probs.size());
	for (std::size_t i = 0; i < order.size(); ++i)
		order[i] = i;
	std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return dist.probs[x] > dist.probs[y]; });
	json top = json::array();
	for (std::size_t i = 0; i < std::min(a.top, order.size()); ++i)
		top.push_back({{"state", region.index_to_state(order[i]).counts}, {"prob", dist.probs[order[i]]}});

	j["empty_probs"] = empty;
	j["long_run"] = top;
	j["mu"] = mu;
	j["queues"] = json::array();
	for (const auto& q : queues)
		j["queues"].push_back(queue_json(q));
	j["u_sigma"] = metrics.utility_rate;
	j["mean_wait"] = number_or_null(metrics.mean_wait);
	j["admission"] = metrics.admission;
	j["flags"] = {{"converged", dist.converged},
	              {"iterations", dist.iterations},
	              {"last_change", dist.last_change},
	              {"empty_queues", metrics.empty_queues}};
	emit(j, g, "markov.json");
	return exit_ok;
}

// search

struct SearchArgs {
	std::string scenario = "table2";
	std::size_t strategies = 100;
	std::string evaluator = "simulation";
	std::string objective = "utility";
	std::string knowledge = "full";
	double horizon = 40.0;
	std::size_t replications = 25;
	std::size_t queue_cap = 100;
	std::string initial = "random_feasible";
	bool any_reserve = false;
	bool exhaustive = false;
};

int cmd_search(const SearchArgs& a, const GlobalOptions& g)
{
	const auto scenario = resolve_scenario(a.scenario);
	const auto region = enumerate_regions(scenario);
	markov::SearchConfig cfg;
	cfg.strategies = exp::scaled(a.strategies, g.scale);
	cfg.evaluator = markov::parse_evaluator(a.evaluator);
	cfg.objective = markov::parse_objective(a.objective);
	cfg.reserve_last = !a.any_reserve;
	cfg.sim.horizon = a.horizon;
	cfg.sim.replications = a.replications;
	cfg.sim.master_seed = g.seed;
	if (a.queue_cap > 0)
		cfg.sim.queue_cap = a.queue_cap;
	cfg.sim.regime = tenant::parse_regime(a.knowledge);
	cfg.sim.initial = sim::parse_initial_state(a.initial);
	cfg.sim.threads = g.threads;
	cfg.sim.validate();

	if (a.exhaustive) {
		const auto fingerprint = scenario_fingerprint(scenario);
		auto score = [&](const Strategy& s) {
			sim::SimConfig sc = cfg.sim;
			sc.threads = 1;
			const auto mc = sim::run_monte_carlo(scenario, region, &s, sc);
			switch (cfg.objective) {
			case markov::Objective::utility:
				return mc.utility_rate.mean;
			case markov::Objective::wait:
				return -mc.joined_wait.mean;
			case markov::Objective::admission:
				return mc.admission.mean;
			}
			return 0.0;
		};
		const auto [best, value] = markov::exhaustive_search(region, score, fingerprint);
		json j{{"strategy", strategy_to_json(best)}, {"objective", a.objective}, {"value", value},
		       {"space", markov::strategy_space_size(region)}};
		emit(j, g, "exhaustive.json");
		return exit_ok;
	}

	const auto result = markov::strategy_search(scenario, region, cfg);
	std::vector<std::size_t> rank(result.random.size());
	for (std::size_t r = 0; r < result.ranking.size(); ++r)
		rank[result.ranking[r]] = r + 1;

	auto write = [&](std::ostream& os) {
		os << "strategy_id,kind,utility,wait,admission,rank\n";
		for (std::size_t i = 0; i < result.random.size(); ++i) {
			const auto& r = result.random[i];
			os << r.strategy_id << ",random," << exp::format_number(r.utility_rate) << ','
			   << exp::format_number(r.mean_wait) << ',' << exp::format_number(r.admission) << ',' << rank[i] << '\n';
		}
		for (const auto& r : result.benchmarks)
			os << ',' << r.label << ',' << exp::format_number(r.utility_rate) << ',' << exp::format_number(r.mean_wait)
			   << ',' << exp::format_number(r.admission) << ",\n";
	};
	if (g.out.empty()) {
		write(std::cout);
	} else {
		exp::prepare_output_dir(g.out, g.force);
		std::ofstream os(fs::path(g.out) / "search.csv");
		write(os);
		save_json((fs::path(g.out) / "best_strategy.json").string(),
		          strategy_to_json(result.strategies[result.ranking.front()]));
		std::cout << "best " << result.best().label << " " << a.objective << " " << result.best().objective << '\n';
	}
	return exit_ok;
}

// preset

struct PresetArgs {
	std::string name;
	std::string scenario = "table2";
};

int cmd_preset(const PresetArgs& a, const GlobalOptions& g)
{
	exp::PresetOptions opt;
	opt.scale = g.scale;
	opt.seed = g.seed;
	opt.threads = g.threads;
	opt.out_dir = g.out.empty() ? fs::path("out") / a.name : fs::path(g.out);
	opt.force = g.force;
	const auto manifest = exp::run_preset(a.name, resolve_scenario(a.scenario), opt);
	std::cout << manifest.dump(2) << '\n';
	return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Admission control and tenant-behavior toolkit for network slicing"};
	app.set_version_flag("--version", std::string(exp::tool_version));
	app.require_subcommand(1);

	GlobalOptions g;
	app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
	app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
	app.add_option("--out", g.out, "Output directory");
	app.add_option("--scale", g.scale, "Campaign size factor in (0, 1]")->capture_default_str();
	app.add_flag("--force", g.force, "Overwrite an existing output directory");

	RegionsArgs regions;
	auto* c_regions = app.add_subcommand("regions", "Enumerate feasibility and admissibility regions");
	c_regions->add_option("--scenario", regions.scenario, "Scenario file, or table2 / case_study")->capture_default_str();
	c_regions->add_flag("--dump", regions.dump, "List every state");

	AnalyzeArgs analyze;
	auto* c_analyze = app.add_subcommand("analyze", "Single-queue steady state with balking and reneging");
	c_analyze->add_option("--lambda", analyze.params.arrival_rate, "Arrival rate")->capture_default_str();
	c_analyze->add_option("--mu", analyze.params.service_rate, "Service (acceptance) rate")->capture_default_str();
	c_analyze->add_option("--alpha", analyze.params.reneging_rate, "Reneging rate")->capture_default_str();
	c_analyze->add_option("--beta", analyze.params.balking_exponent, "Balking exponent")->capture_default_str();
	c_analyze->add_option("--pmf-terms", analyze.pmf_terms, "PMF entries to print")->capture_default_str();
	c_analyze->add_option("--join-model", analyze.model, "exogenous or as_printed")->capture_default_str();

	SimulateArgs simulate;
	auto* c_sim = app.add_subcommand("simulate", "Discrete-event simulation of the controller");
	c_sim->add_option("--scenario", simulate.scenario, "Scenario file, or table2 / case_study")->capture_default_str();
	c_sim->add_option("--strategy", simulate.strategy, "FILE, naive:1,2,0, random or greedy")->capture_default_str();
	c_sim->add_option("--horizon", simulate.horizon, "Periods per replication")->capture_default_str();
	c_sim->add_option("--replications", simulate.replications, "Replications")->capture_default_str();
	c_sim->add_option("--knowledge", simulate.knowledge, "patient|blind|position|avg_wait|serving_rate|full")
		->capture_default_str();
	c_sim->add_option("--risk-factor", simulate.risk_factor, "Blind tenants' risk factor")->capture_default_str();
	c_sim->add_option("--delta-k", simulate.delta_k, "Position-only estimator threshold")->capture_default_str();
	c_sim->add_option("--queue-cap", simulate.queue_cap, "Per-queue cap, 0 for none")->capture_default_str();
	c_sim->add_option("--initial", simulate.initial, "empty|random_feasible|random_full")->capture_default_str();
	c_sim->add_option("--warmup", simulate.warmup, "Fraction of the horizon excluded from time averages")
		->capture_default_str();
	c_sim->add_flag("--trace", simulate.trace, "Write events.jsonl");

	FitArgs fit;
	auto* c_fit = app.add_subcommand("fit", "Fit a distribution to a CSV column");
	c_fit->add_option("--input", fit.input, "CSV file")->required();
	c_fit->add_option("--column", fit.column, "Column name")->required();
	c_fit->add_option("--dist", fit.distribution, "geometric or exponential")->capture_default_str();
	c_fit->add_option("--where", fit.where, "Row filter COLUMN=VALUE, repeatable");
	c_fit->add_flag("--gaps", fit.gaps, "Treat the column as timestamps and fit the binned gaps");
	c_fit->add_option("--period", fit.period, "Bin width for --gaps")->capture_default_str();

	MarkovArgs mk;
	auto* c_markov = app.add_subcommand("markov", "Embedded-chain approximation of a strategy");
	c_markov->add_option("--scenario", mk.scenario, "Scenario file, or table2 / case_study")->capture_default_str();
	c_markov->add_option("--strategy", mk.strategy, "FILE, naive:1,2,0 or random")->capture_default_str();
	c_markov->add_option("--empty-probs", mk.empty_probs, "simulate, or p_1,...,p_N")->capture_default_str();
	c_markov->add_option("--knowledge", mk.knowledge, "Regime of the bootstrap run")->capture_default_str();
	c_markov->add_option("--bootstrap-horizon", mk.bootstrap_horizon, "Periods of the bootstrap run")
		->capture_default_str();
	c_markov->add_flag("--fixed-point", mk.fixed_point, "Iterate mu -> p(0) -> Psi -> mu");
	c_markov->add_option("--top", mk.top, "Most likely states to report")->capture_default_str();

	SearchArgs search;
	auto* c_search = app.add_subcommand("search", "Random strategy search with benchmarks");
	c_search->add_option("--scenario", search.scenario, "Scenario file, or table2 / case_study")->capture_default_str();
	c_search->add_option("--strategies", search.strategies, "Random strategies before --scale")->capture_default_str();
	c_search->add_option("--evaluator", search.evaluator, "simulation or analytic")->capture_default_str();
	c_search->add_option("--objective", search.objective, "utility, wait or admission")->capture_default_str();
	c_search->add_option("--knowledge", search.knowledge, "Tenant regime")->capture_default_str();
	c_search->add_option("--horizon", search.horizon, "Periods per round")->capture_default_str();
	c_search->add_option("--replications", search.replications, "Rounds per strategy")->capture_default_str();
	c_search->add_option("--queue-cap", search.queue_cap, "Per-queue cap, 0 for none")->capture_default_str();
	c_search->add_option("--initial", search.initial, "empty|random_feasible|random_full")->capture_default_str();
	c_search->add_flag("--any-reserve", search.any_reserve, "Sample all permutations, not only reserve-last");
	c_search->add_flag("--exhaustive", search.exhaustive, "Enumerate every strategy (small regions only)");

	PresetArgs preset;
	auto* c_preset = app.add_subcommand("preset", "Run a named experiment campaign");
	c_preset->add_option("name", preset.name, "table3|fig4_iat|fig5_reneging|fig6_search|regions")
		->required()
		->check(CLI::IsMember(exp::preset_names()));
	c_preset->add_option("--scenario", preset.scenario, "Scenario file, or table2 / case_study")->capture_default_str();

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp& e) {
		return app.exit(e);
	} catch (const CLI::CallForVersion& e) {
		return app.exit(e);
	} catch (const CLI::ParseError& e) {
		app.exit(e);
		return exit_invalid;
	}

	try {
		if (!(g.scale > 0.0 && g.scale <= 1.0))
			throw InvalidInput("--scale must be in (0, 1]");
		if (*c_regions)
			return cmd_regions(regions, g);
		if (*c_analyze)
			return cmd_analyze(analyze, g);
		if (*c_sim)
			return cmd_simulate(simulate, g);
		if (*c_fit)
			return cmd_fit(fit, g);
		if (*c_markov)
			return cmd_markov(mk, g);
		if (*c_search)
			return cmd_search(search, g);
		if (*c_preset)
			return cmd_preset(preset, g);
	} catch (const InvalidInput& e) {
		std::cerr << "error: " << e.what() << '\n';
		return exit_invalid;
	} catch (const NumericError& e) {
		std::cerr << "numeric failure: " << e.what() << '\n';
		return exit_numeric;
	} catch (const nlohmann::json::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return exit_invalid;
	} catch (const fs::filesystem_error& e) {
		std::cerr << "error: " << e.what() << '\n';
		return exit_invalid;
	}
	return exit_ok;
}
