#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "slicing/core.hpp"
#include "slicing/markov.hpp"
#include "slicing/simulation.hpp"
#include "slicing/stats.hpp"
#include "slicing/tenant.hpp"

namespace slicing::exp {

inline constexpr const char* tool_version = "1.0.0";

/// Shortest round-trip decimal text, identical on every run.
std::string format_number(double v);

/// Writes a header row then rows of cells; quotes cells containing commas.
class CsvWriter {
public:
	CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
	void row(const std::vector<std::string>& cells);

private:
	std::ofstream out_;
	std::size_t columns_;
};

/// Refuses an existing directory unless `force`; creates it otherwise.
void prepare_output_dir(const std::filesystem::path& dir, bool force);

/// Campaign size scaled by `scale`, at least 1.
std::size_t scaled(std::size_t base, double scale);

struct LabeledRegime {
	std::string label;
	tenant::KnowledgeRegime regime;
};

/// Patient, blind (risk 1, 0.1, 0.01), position (delta K = 2), average wait,
/// serving rate, full knowledge.
std::vector<LabeledRegime> table3_regimes();

struct Table3Row {
	std::string label;
	std::vector<double> total_profit;  // per type, mean over strategies
	std::vector<double> mean_profit;   // per type, pooled over issued requests
	std::vector<double> chance;        // per type, pooled
	double pooled_total_profit = 0.0;  // both types, mean over strategies
	double pooled_mean_profit = 0.0;   // both types, pooled over issued requests
	std::size_t issued = 0;
};

/// `strategies` random reserve-last strategies, each simulated once per
/// regime for `horizon` periods from an empty system with queue cap 100.
/// All regimes see the same strategies and random numbers.
std::vector<Table3Row> run_table3(const Scenario& scenario, std::size_t strategies, std::uint64_t seed,
                                  std::size_t threads, double horizon = 1000.0);

struct IatTrack {
	std::string regime;
	std::size_t strategy = 0;
	std::size_t round = 0;
	std::size_t queue = 0; // slice type, 0-based
	stats::FitResult fit;
	bool success = false;
};

/// Geometric fits of per-queue inter-acceptance times, patient versus full
/// knowledge, rounds of `periods` periods from a random fully-utilized state.
std::vector<IatTrack> run_fig4(const Scenario& scenario, std::size_t strategies, std::size_t rounds, double periods,
                               std::uint64_t seed, std::size_t threads);

double success_rate(const std::vector<IatTrack>& tracks, const std::string& regime);

struct RenegeSample {
	std::string campaign; // "random" or "prefer2"
	std::vector<std::vector<double>> waits; // per slice type
};

/// Reneging times under full knowledge, random strategies and the fixed
/// prefer-type-2 strategy.
std::vector<RenegeSample> run_fig5(const Scenario& scenario, std::size_t strategies, std::size_t rounds,
                                   double periods, std::uint64_t seed, std::size_t threads);

/// Random-strategy search with benchmarks: full-knowledge tenants, rounds of
/// `periods` periods from a random feasible state, queue cap 100.
markov::SearchResult run_fig6(const Scenario& scenario, std::size_t strategies, std::size_t rounds, double periods,
                              std::uint64_t seed, std::size_t threads);

struct PresetOptions {
	double scale = 1.0;
	std::uint64_t seed = 1;
	std::size_t threads = 1;
	std::filesystem::path out_dir;
	bool force = false;
};

/// Names accepted by run_preset().
const std::vector<std::string>& preset_names();

/// Runs a named campaign and writes CSV/JSON plus manifest.json into
/// options.out_dir. Returns the manifest.
nlohmann::json run_preset(const std::string& name, const Scenario& scenario, const PresetOptions& options);

} // namespace slicing::exp
