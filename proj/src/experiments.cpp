#include "slicing/experiments.hpp"

#include <charconv>
#include <cmath>

#include "slicing/error.hpp"

namespace slicing::exp {

namespace fs = std::filesystem;

std::string format_number(double v)
{
	if (std::isnan(v))
		return "nan";
	if (std::isinf(v))
		return v > 0 ? "inf" : "-inf";
	char buf[64];
	auto res = std::to_chars(buf, buf + sizeof buf, v);
	return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
	: out_(path), columns_(header.size())
{
	if (!out_)
		throw InvalidInput("cannot write " + path.string());
	row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells)
{
	if (cells.size() != columns_)
		throw std::logic_error("CSV row has the wrong number of cells");
	for (std::size_t i = 0; i < cells.size(); ++i) {
		if (i)
			out_ << ',';
		if (cells[i].find_first_of(",\"\n") != std::string::npos) {
			out_ << '"';
			for (char c : cells[i])
				out_ << (c == '"' ? "\"\"" : std::string(1, c));
			out_ << '"';
		} else {
			out_ << cells[i];
		}
	}
	out_ << '\n';
}

void prepare_output_dir(const fs::path& dir, bool force)
{
	if (dir.empty())
		throw InvalidInput("an output directory is required (--out)");
	if (fs::exists(dir) && !force)
		throw InvalidInput("output directory " + dir.string() + " exists; pass --force to overwrite");
	fs::create_directories(dir);
}

std::size_t scaled(std::size_t base, double scale)
{
	if (!(scale > 0.0 && scale <= 1.0))
		throw InvalidInput("scale must be in (0, 1]");
	return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(base) * scale)));
}

std::vector<LabeledRegime> table3_regimes()
{
	using tenant::KnowledgeRegime;
	return {
		{"patient", KnowledgeRegime::patient()},
		{"blind_1", KnowledgeRegime::blind(1.0)},
		{"blind_0.1", KnowledgeRegime::blind(0.1)},
		{"blind_0.01", KnowledgeRegime::blind(0.01)},
		{"position", KnowledgeRegime::position_only(2)},
		{"avg_wait", KnowledgeRegime::avg_wait()},
		{"serving_rate", KnowledgeRegime::serving_rate()},
		{"full", KnowledgeRegime::full()},
	};
}

namespace {

constexpr std::size_t campaign_queue_cap = 100;

std::vector<Strategy> random_strategies(const Scenario& scenario, const RegionIndex& region, std::size_t count,
                                        std::uint64_t seed)
{
	const auto fp = scenario_fingerprint(scenario);
	std::vector<Strategy> out;
	for (std::size_t i = 0; i < count; ++i) {
		Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::strategy), i}));
		out.push_back(random_strategy(region, rng, true, fp));
	}
	return out;
}

Strategy prefer(const Scenario& scenario, const RegionIndex& region, std::vector<int> order)
{
	return naive_strategy(region, PreferenceVector(std::move(order)), scenario_fingerprint(scenario));
}

} // namespace

std::vector<Table3Row> run_table3(const Scenario& scenario, std::size_t strategies, std::uint64_t seed,
                                  std::size_t threads, double horizon)
{
	const auto region = enumerate_regions(scenario);
	const auto strats = random_strategies(scenario, region, strategies, seed);
	const auto regimes = table3_regimes();
	const std::size_t n = scenario.type_count();

	// profits[regime][strategy][type]
	std::vector<std::vector<std::vector<std::vector<double>>>> profits(
		regimes.size(), std::vector<std::vector<std::vector<double>>>(strats.size()));
	sim::parallel_for(regimes.size() * strats.size(), threads, [&](std::size_t task) {
		const std::size_t g = task / strats.size();
		const std::size_t s = task % strats.size();
		sim::SimConfig cfg;
		cfg.horizon = horizon;
		cfg.queue_cap = campaign_queue_cap;
		cfg.regime = regimes[g].regime;
		const auto run = sim::run_replication(scenario, region, strats[s], cfg, sim::replication_seed(seed, s));
		for (std::size_t t = 0; t < n; ++t)
			profits[g][s].push_back(run.end_profits(t));
	});

	std::vector<Table3Row> rows;
	for (std::size_t g = 0; g < regimes.size(); ++g) {
		Table3Row row;
		row.label = regimes[g].label;
		std::vector<double> pooled;
		for (std::size_t t = 0; t < n; ++t) {
			std::vector<double> all;
			double total = 0.0;
			for (std::size_t s = 0; s < strats.size(); ++s) {
				const auto& p = profits[g][s][t];
				all.insert(all.end(), p.begin(), p.end());
				for (double v : p)
					total += v;
			}
			const auto summary = stats::profit_summary(all);
			row.total_profit.push_back(total / static_cast<double>(strats.size()));
			row.mean_profit.push_back(summary.mean);
			row.chance.push_back(summary.chance);
			row.pooled_total_profit += total / static_cast<double>(strats.size());
			pooled.insert(pooled.end(), all.begin(), all.end());
		}
		const auto summary = stats::profit_summary(pooled);
		row.pooled_mean_profit = summary.mean;
		row.issued = summary.issued;
		rows.push_back(std::move(row));
	}
	return rows;
}

std::vector<IatTrack> run_fig4(const Scenario& scenario, std::size_t strategies, std::size_t rounds, double periods,
                               std::uint64_t seed, std::size_t threads)
{
	const auto region = enumerate_regions(scenario);
	const auto strats = random_strategies(scenario, region, strategies, seed);
	const std::vector<LabeledRegime> regimes{{"patient", tenant::KnowledgeRegime::patient()},
	                                         {"full", tenant::KnowledgeRegime::full()}};
	const std::size_t n = scenario.type_count();
	std::vector<std::vector<IatTrack>> per_task(regimes.size() * strats.size());
	sim::parallel_for(per_task.size(), threads, [&](std::size_t task) {
		const std::size_t g = task / strats.size();
		const std::size_t s = task % strats.size();
		sim::SimConfig cfg;
		cfg.horizon = periods;
		cfg.replications = rounds;
		cfg.master_seed = derive_seed(seed, {s});
		cfg.queue_cap = campaign_queue_cap;
		cfg.regime = regimes[g].regime;
		cfg.initial = sim::InitialState::random_full;
		const auto mc = sim::run_monte_carlo(scenario, region, &strats[s], cfg);
		for (std::size_t r = 0; r < mc.runs.size(); ++r)
			for (std::size_t t = 0; t < n; ++t) {
				IatTrack track;
				track.regime = regimes[g].label;
				track.strategy = s;
				track.round = r;
				track.queue = t;
				const auto gaps = stats::binned_gaps(mc.runs[r].acceptance_times[t]);
				if (!gaps.empty()) {
					track.fit = stats::fit_geometric(gaps);
					track.success = stats::fit_success(track.fit);
				}
				per_task[task].push_back(track);
			}
	});
	std::vector<IatTrack> out;
	for (auto& v : per_task)
		out.insert(out.end(), v.begin(), v.end());
	return out;
}

double success_rate(const std::vector<IatTrack>& tracks, const std::string& regime)
{
	std::size_t total = 0, ok = 0;
	for (const auto& t : tracks)
		if (t.regime == regime) {
			++total;
			ok += t.success ? 1 : 0;
		}
	return total ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;
}

std::vector<RenegeSample> run_fig5(const Scenario& scenario, std::size_t strategies, std::size_t rounds,
                                   double periods, std::uint64_t seed, std::size_t threads)
{
	const auto region = enumerate_regions(scenario);
	const std::size_t n = scenario.type_count();
	const auto strats = random_strategies(scenario, region, strategies, seed);
	std::vector<int> order{2};
	for (std::size_t t = 0; t < n; ++t)
		if (t != 1)
			order.push_back(static_cast<int>(t + 1));
	order.push_back(0);
	const auto fixed = prefer(scenario, region, order);

	// Task i < strategies: random strategy i; otherwise repetition of the fixed strategy.
	std::vector<std::vector<std::vector<double>>> waits(2 * strats.size(), std::vector<std::vector<double>>(n));
	sim::parallel_for(waits.size(), threads, [&](std::size_t task) {
		const bool random = task < strats.size();
		const std::size_t s = random ? task : task - strats.size();
		sim::SimConfig cfg;
		cfg.horizon = periods;
		cfg.replications = rounds;
		cfg.master_seed = derive_seed(seed, {s});
		cfg.queue_cap = campaign_queue_cap;
		cfg.regime = tenant::KnowledgeRegime::full();
		cfg.initial = sim::InitialState::random_full;
		const auto mc = sim::run_monte_carlo(scenario, region, random ? &strats[s] : &fixed, cfg);
		for (const auto& run : mc.runs)
			for (std::size_t t = 0; t < n; ++t) {
				const auto w = run.renege_waits(t);
				waits[task][t].insert(waits[task][t].end(), w.begin(), w.end());
			}
	});
	std::vector<RenegeSample> out{{"random", std::vector<std::vector<double>>(n)},
	                              {"prefer2", std::vector<std::vector<double>>(n)}};
	for (std::size_t task = 0; task < waits.size(); ++task) {
		auto& dst = out[task < strats.size() ? 0 : 1];
		for (std::size_t t = 0; t < n; ++t)
			dst.waits[t].insert(dst.waits[t].end(), waits[task][t].begin(), waits[task][t].end());
	}
	return out;
}

markov::SearchResult run_fig6(const Scenario& scenario, std::size_t strategies, std::size_t rounds, double periods,
                              std::uint64_t seed, std::size_t threads)
{
	const auto region = enumerate_regions(scenario);
	markov::SearchConfig cfg;
	cfg.strategies = strategies;
	cfg.sim.horizon = periods;
	cfg.sim.replications = rounds;
	cfg.sim.master_seed = seed;
	cfg.sim.queue_cap = campaign_queue_cap;
	cfg.sim.regime = tenant::KnowledgeRegime::full();
	cfg.sim.initial = sim::InitialState::random_feasible;
	cfg.sim.threads = threads;
	cfg.evaluator = markov::Evaluator::simulation;
	cfg.objective = markov::Objective::utility;
	return markov::strategy_search(scenario, region, cfg);
}

const std::vector<std::string>& preset_names()
{
	static const std::vector<std::string> names{"table3", "fig4_iat", "fig5_reneging", "fig6_search", "regions"};
	return names;
}

namespace {

constexpr std::size_t campaign_rounds = 25;
constexpr double campaign_periods = 40.0;

void write_json(const fs::path& path, const nlohmann::json& j)
{
	std::ofstream out(path);
	if (!out)
		throw InvalidInput("cannot write " + path.string());
	out << j.dump(2) << '\n';
}

std::string fit_cell(double v, bool defined) { return defined ? format_number(v) : ""; }

} // namespace

nlohmann::json run_preset(const std::string& name, const Scenario& scenario, const PresetOptions& options)
{
	scenario.validate();
	if (std::find(preset_names().begin(), preset_names().end(), name) == preset_names().end())
		throw InvalidInput("unknown preset '" + name + "'");
	const std::size_t strategies_1000 = scaled(1000, options.scale);
	prepare_output_dir(options.out_dir, options.force);
	const fs::path dir = options.out_dir;

	nlohmann::json manifest;
	manifest["preset"] = name;
	manifest["tool_version"] = tool_version;
	manifest["seed"] = options.seed;
	manifest["scale"] = options.scale;
	manifest["scenario_fingerprint"] = scenario_fingerprint(scenario);
	manifest["scenario"] = scenario_to_json(scenario);
	std::vector<std::string> files;

	if (name == "regions") {
		const auto region = enumerate_regions(scenario);
		nlohmann::json report;
		report["feasible"] = region.size();
		report["admissible"] = region.admissible_count();
		report["admissible_states"] = nlohmann::json::array();
		for (const auto& s : region.admissible())
			report["admissible_states"].push_back(s.counts);
		write_json(dir / "regions.json", report);
		files.push_back("regions.json");
	} else if (name == "table3") {
		const double horizon = 1000.0;
		const auto rows = run_table3(scenario, strategies_1000, options.seed, options.threads, horizon);
		std::vector<std::string> header{"case"};
		for (std::size_t t = 1; t <= scenario.type_count(); ++t)
			for (const char* col : {"total_profit", "mean_profit", "profiting_chance"})
				header.push_back(std::string(col) + "_type" + std::to_string(t));
		header.push_back("issued");
		CsvWriter csv(dir / "table3.csv", header);
		for (const auto& r : rows) {
			std::vector<std::string> cells{r.label};
			for (std::size_t t = 0; t < scenario.type_count(); ++t) {
				cells.push_back(format_number(r.total_profit[t]));
				cells.push_back(format_number(r.mean_profit[t]));
				cells.push_back(format_number(r.chance[t]));
			}
			cells.push_back(std::to_string(r.issued));
			csv.row(cells);
		}
		files.push_back("table3.csv");
		manifest["parameters"] = {{"strategies", strategies_1000}, {"horizon", horizon}, {"queue_cap", 100}};
	} else if (name == "fig4_iat") {
		const auto tracks =
			run_fig4(scenario, strategies_1000, campaign_rounds, campaign_periods, options.seed, options.threads);
		CsvWriter csv(dir / "fig4_iat.csv",
		              {"regime", "strategy", "round", "queue", "n", "p_hat", "kld", "converged", "degenerate", "success"});
		for (const auto& t : tracks)
			csv.row({t.regime, std::to_string(t.strategy), std::to_string(t.round), std::to_string(t.queue + 1),
			         std::to_string(t.fit.n), fit_cell(t.fit.parameter, t.fit.n > 0),
			         fit_cell(t.fit.kld, t.fit.converged), t.fit.converged ? "1" : "0", t.fit.degenerate ? "1" : "0",
			         t.success ? "1" : "0"});
		files.push_back("fig4_iat.csv");
		manifest["success_rate"] = {{"patient", success_rate(tracks, "patient")}, {"full", success_rate(tracks, "full")}};
		manifest["parameters"] = {{"strategies", strategies_1000},
		                          {"rounds", campaign_rounds},
		                          {"periods", campaign_periods},
		                          {"initial_state", "random_full"},
		                          {"queue_cap", 100}};
	} else if (name == "fig5_reneging") {
		const auto samples =
			run_fig5(scenario, strategies_1000, campaign_rounds, campaign_periods, options.seed, options.threads);
		CsvWriter waits(dir / "fig5_reneging_times.csv", {"campaign", "queue", "wait"});
		CsvWriter fits(dir / "fig5_fits.csv", {"campaign", "queue", "n", "rate", "tail_diagnostic", "fat_tail"});
		for (const auto& s : samples)
			for (std::size_t t = 0; t < s.waits.size(); ++t) {
				for (double w : s.waits[t])
					waits.row({s.campaign, std::to_string(t + 1), format_number(w)});
				std::vector<double> positive;
				for (double w : s.waits[t])
					if (w > 0.0)
						positive.push_back(w);
				if (positive.size() >= 2) {
					const auto f = stats::fit_exponential(positive);
					fits.row({s.campaign, std::to_string(t + 1), std::to_string(f.n), format_number(f.parameter),
					          format_number(f.tail_diagnostic), f.fat_tail ? "1" : "0"});
				} else {
					fits.row({s.campaign, std::to_string(t + 1), std::to_string(positive.size()), "", "", ""});
				}
			}
		files.push_back("fig5_reneging_times.csv");
		files.push_back("fig5_fits.csv");
		manifest["parameters"] = {{"strategies", strategies_1000},
		                          {"repetitions_prefer2", strategies_1000},
		                          {"rounds", campaign_rounds},
		                          {"periods", campaign_periods},
		                          {"regime", "full"}};
	} else if (name == "fig6_search") {
		const std::size_t strategies = scaled(10000, options.scale);
		const auto result =
			run_fig6(scenario, strategies, campaign_rounds, campaign_periods, options.seed, options.threads);
		CsvWriter csv(dir / "fig6_search.csv", {"strategy_id", "label", "benchmark", "utility_rate", "mean_wait", "admission"});
		for (const auto& r : result.random)
			csv.row({std::to_string(r.strategy_id), r.label, "0", format_number(r.utility_rate),
			         format_number(r.mean_wait), format_number(r.admission)});
		for (const auto& r : result.benchmarks)
			csv.row({"", r.label, "1", format_number(r.utility_rate), format_number(r.mean_wait),
			         format_number(r.admission)});
		files.push_back("fig6_search.csv");
		manifest["parameters"] = {{"strategies", strategies},
		                          {"rounds", campaign_rounds},
		                          {"periods", campaign_periods},
		                          {"initial_state", "random_feasible"},
		                          {"regime", "full"},
		                          {"queue_cap", 100}};
	}

	manifest["files"] = files;
	write_json(dir / "manifest.json", manifest);
	return manifest;
}

} // namespace slicing::exp
