#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace slicing::stats {

/// Counts over the non-negative integers.
struct EmpiricalPMF {
	std::vector<std::size_t> counts;
	std::size_t n = 0;

	static EmpiricalPMF from_samples(const std::vector<std::int64_t>& samples);
	double prob(std::size_t k) const { return k < counts.size() && n ? static_cast<double>(counts[k]) / n : 0.0; }
	double mean() const;
};

struct FitResult {
	double parameter = 0.0;      // p-hat for geometric, rate for exponential
	bool converged = false;
	bool degenerate = false;
	double log_likelihood = 0.0;
	double kld = 0.0;            // geometric only
	std::size_t n = 0;
	double tail_diagnostic = 0.0; // exponential only: empirical / fitted 99th percentile
	bool fat_tail = false;
};

inline constexpr std::size_t geometric_min_samples = 10;
inline constexpr double fit_kld_gate = 0.25;
inline constexpr std::size_t fit_success_min_samples = 30;
inline constexpr double fat_tail_threshold = 1.5;

/// MLE on support {0, 1, ...}: p-hat = 1 / (1 + mean). Throws InvalidInput on
/// empty or negative samples.
FitResult fit_geometric(const std::vector<std::int64_t>& samples);

/// sum_k p_emp(k) ln(p_emp(k) / ((1 - p)^k p)) over k with p_emp(k) > 0.
double kld_vs_geometric(const EmpiricalPMF& pmf, double p);

/// converged && KLD <= 0.25 && n >= 30.
bool fit_success(const FitResult& fit);

/// MLE rate = 1 / mean, with the 99th-percentile tail diagnostic.
/// Throws InvalidInput on fewer than two or non-positive samples.
FitResult fit_exponential(const std::vector<double>& samples);

/// Differences of sorted timestamps, floored to whole periods.
std::vector<std::int64_t> binned_gaps(const std::vector<double>& timestamps, double period = 1.0);

/// Linear-interpolated empirical quantile, q in [0, 1].
double quantile(std::vector<double> samples, double q);

struct ProfitSummary {
	double total = 0.0;
	double mean = 0.0;
	double chance = 0.0;   // fraction of issued requests with positive end-profit
	std::size_t issued = 0;
	bool empty = true;
};

ProfitSummary profit_summary(const std::vector<double>& end_profits);

struct MeanSe {
	double mean = 0.0;
	double se = 0.0;
	std::size_t n = 0;
};

MeanSe mean_se(const std::vector<double>& values);

} // namespace slicing::stats
