#include "slicing/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slicing/error.hpp"

namespace slicing::stats {

EmpiricalPMF EmpiricalPMF::from_samples(const std::vector<std::int64_t>& samples)
{
	EmpiricalPMF pmf;
	for (auto s : samples) {
		if (s < 0)
			throw InvalidInput("empirical PMF: negative sample");
		const auto k = static_cast<std::size_t>(s);
		if (k >= pmf.counts.size())
			pmf.counts.resize(k + 1, 0);
		++pmf.counts[k];
		++pmf.n;
	}
	return pmf;
}

double EmpiricalPMF::mean() const
{
	if (n == 0)
		return 0.0;
	double total = 0.0;
	for (std::size_t k = 0; k < counts.size(); ++k)
		total += static_cast<double>(k) * static_cast<double>(counts[k]);
	return total / static_cast<double>(n);
}

double kld_vs_geometric(const EmpiricalPMF& pmf, double p)
{
	if (!(p > 0.0 && p <= 1.0))
		throw InvalidInput("kld_vs_geometric: p must be in (0, 1]");
	double kld = 0.0;
	for (std::size_t k = 0; k < pmf.counts.size(); ++k) {
		const double q = pmf.prob(k);
		if (q <= 0.0)
			continue;
		const double log_model = static_cast<double>(k) * std::log1p(-p) + std::log(p);
		kld += q * (std::log(q) - log_model);
	}
	return std::max(0.0, kld); // clamp rounding noise at exact fits
}

FitResult fit_geometric(const std::vector<std::int64_t>& samples)
{
	if (samples.empty())
		throw InvalidInput("fit_geometric: no samples");
	const auto pmf = EmpiricalPMF::from_samples(samples);
	FitResult fit;
	fit.n = pmf.n;
	const double mean = pmf.mean();
	fit.parameter = 1.0 / (1.0 + mean);
	if (mean == 0.0) {
		fit.degenerate = true;
		fit.parameter = 1.0;
		fit.converged = false;
		fit.kld = 0.0;
		fit.log_likelihood = 0.0;
		return fit;
	}
	const double p = fit.parameter;
	fit.log_likelihood = static_cast<double>(pmf.n) * (std::log(p) + mean * std::log1p(-p));
	fit.kld = kld_vs_geometric(pmf, p);
	fit.converged = pmf.n >= geometric_min_samples;
	return fit;
}

bool fit_success(const FitResult& fit)
{
	return fit.converged && fit.kld <= fit_kld_gate && fit.n >= fit_success_min_samples;
}

double quantile(std::vector<double> samples, double q)
{
	if (samples.empty())
		throw InvalidInput("quantile: no samples");
	std::sort(samples.begin(), samples.end());
	const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
	const auto lo = static_cast<std::size_t>(std::floor(pos));
	const auto hi = std::min(lo + 1, samples.size() - 1);
	const double frac = pos - static_cast<double>(lo);
	return samples[lo] + frac * (samples[hi] - samples[lo]);
}

FitResult fit_exponential(const std::vector<double>& samples)
{
	if (samples.size() < 2)
		throw InvalidInput("fit_exponential: need at least two samples");
	for (double s : samples)
		if (!(s > 0.0) || !std::isfinite(s))
			throw InvalidInput("fit_exponential: samples must be positive and finite");
	FitResult fit;
	fit.n = samples.size();
	const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
	fit.parameter = 1.0 / mean;
	fit.converged = true;
	fit.log_likelihood = static_cast<double>(fit.n) * (std::log(fit.parameter) - 1.0);
	const double fitted_p99 = std::log(100.0) / fit.parameter;
	fit.tail_diagnostic = quantile(samples, 0.99) / fitted_p99;
	fit.fat_tail = fit.tail_diagnostic > fat_tail_threshold;
	return fit;
}

std::vector<std::int64_t> binned_gaps(const std::vector<double>& timestamps, double period)
{
	if (!(period > 0.0))
		throw InvalidInput("binned_gaps: period must be > 0");
	std::vector<double> t = timestamps;
	std::sort(t.begin(), t.end());
	std::vector<std::int64_t> out;
	for (std::size_t i = 1; i < t.size(); ++i)
		out.push_back(static_cast<std::int64_t>(std::floor((t[i] - t[i - 1]) / period)));
	return out;
}

ProfitSummary profit_summary(const std::vector<double>& end_profits)
{
	ProfitSummary s;
	s.issued = end_profits.size();
	if (end_profits.empty())
		return s;
	s.empty = false;
	std::size_t positive = 0;
	for (double p : end_profits) {
		s.total += p;
		if (p > 0.0)
			++positive;
	}
	s.mean = s.total / static_cast<double>(s.issued);
	s.chance = static_cast<double>(positive) / static_cast<double>(s.issued);
	return s;
}

MeanSe mean_se(const std::vector<double>& values)
{
	MeanSe out;
	out.n = values.size();
	if (values.empty())
		return out;
	out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(out.n);
	if (out.n > 1) {
		double ss = 0.0;
		for (double v : values)
			ss += (v - out.mean) * (v - out.mean);
		out.se = std::sqrt(ss / static_cast<double>(out.n - 1) / static_cast<double>(out.n));
	}
	return out;
}

} // namespace slicing::stats
