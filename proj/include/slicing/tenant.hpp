#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace slicing::tenant {

/// Business terms of one slice request: [n, u0, u, zeta, tau].
struct TenantRequest {
	std::size_t slice_type = 0;    // 0-based
	double issue_cost = 0.0;        // u0
	double waiting_cost_rate = 0.0; // u
	double profit_rate = 0.0;       // zeta
	double lifetime = 0.0;          // tau, realized draw

	double lifetime_profit() const { return profit_rate * lifetime; }
};

enum class LifetimeKind { uniform, rational, pareto, exponential };

/// Distribution of the slice lifetime tau.
///   uniform(0, tau_max), rational (density 1/(t+1)^2), pareto(1, 1), exponential(eta)
struct LifetimeDistribution {
	LifetimeKind kind = LifetimeKind::exponential;
	double parameter = 1.0; // tau_max for uniform, eta for exponential, unused otherwise

	static LifetimeDistribution uniform(double tau_max) { return {LifetimeKind::uniform, tau_max}; }
	static LifetimeDistribution rational() { return {LifetimeKind::rational, 1.0}; }
	static LifetimeDistribution pareto() { return {LifetimeKind::pareto, 1.0}; }
	static LifetimeDistribution exponential(double eta) { return {LifetimeKind::exponential, eta}; }

	double cdf(double t) const;
	double pdf(double t) const;
};

enum class KnowledgeKind { patient, blind, position_only, avg_wait, serving_rate, full };

struct KnowledgeRegime {
	KnowledgeKind kind = KnowledgeKind::patient;
	double risk_factor = std::numeric_limits<double>::infinity(); // blind only
	std::size_t delta_k = 2;                                      // position_only only

	static KnowledgeRegime patient() { return {}; }
	static KnowledgeRegime blind(double risk) { return {KnowledgeKind::blind, risk, 2}; }
	static KnowledgeRegime position_only(std::size_t dk) { return {KnowledgeKind::position_only, std::numeric_limits<double>::infinity(), dk}; }
	static KnowledgeRegime avg_wait() { return {KnowledgeKind::avg_wait}; }
	static KnowledgeRegime serving_rate() { return {KnowledgeKind::serving_rate}; }
	static KnowledgeRegime full() { return {KnowledgeKind::full}; }

	/// Whether tenants in this regime ever balk. Position-only and blind
	/// tenants have no a-priori wait estimate, so they always issue.
	bool balks() const
	{
		return kind == KnowledgeKind::avg_wait || kind == KnowledgeKind::serving_rate || kind == KnowledgeKind::full;
	}

	std::string name() const;
	void validate() const;
};

/// "patient", "blind", "position", "avg_wait", "serving_rate", "full".
KnowledgeRegime parse_regime(const std::string& name, double risk_factor = 0.01, std::size_t delta_k = 2);

/// What the MNO publishes. Everything is optional; publish_view() keeps only
/// what a regime is allowed to see.
struct QueueInfoView {
	std::optional<std::size_t> position;     // k, 1 = head of queue
	std::optional<std::size_t> length;       // l
	std::optional<double> serving_rate;      // mu-hat
	std::vector<double> reneging_rates;      // omega-hat_i for i = 1, 2, ... (omega_0 = 0 implicit)
	std::optional<double> average_wait;      // w-bar
};

QueueInfoView publish_view(const KnowledgeRegime& regime, const QueueInfoView& everything);

enum class BalkDecision { issue, balk };
enum class RenegeDecision { wait, renege };

/// Issue iff zeta tau - u0 - u l / mu >= 0, where l counts the new request.
BalkDecision balk_decision(const TenantRequest& req, std::size_t length, double serving_rate);

/// b(l) = 1 - F_tau((u0 mu + u l) / (mu zeta)), evaluated through the CDF.
double balking_chance(const LifetimeDistribution& dist, double length, double serving_rate, double waiting_cost_rate,
                      double profit_rate, double issue_cost = 0.0);

/// Closed forms for u0 = 0: b_uni, b_rat, b_par, b_exp.
double balking_chance_closed_form(const LifetimeDistribution& dist, double length, double serving_rate,
                                  double waiting_cost_rate, double profit_rate);

/// E{w_k} = sum_{i=0}^{k-1} 1 / (mu + sum_{j=0}^{i} omega_j), omega_0 = 0.
/// `reneging_rates[i-1]` is omega_i; missing entries count as 0.
double expected_wait(std::size_t position, double serving_rate, const std::vector<double>& reneging_rates);

RenegeDecision renege_full(const TenantRequest& req, std::size_t position, double serving_rate,
                           const std::vector<double>& reneging_rates);

/// Wait iff k <= mu zeta tau / u.
RenegeDecision renege_serving_rate(const TenantRequest& req, std::size_t position, double serving_rate);

struct PositionVerdict {
	RenegeDecision decision = RenegeDecision::wait;
	/// Time spent at the current position after which the request reneges if
	/// the position has not changed by then. Empty while the estimator is off.
	std::optional<double> deadline;
};

/// Online mu estimate (l - k) / T_k, T_k the time spent at the current
/// position. Wait unconditionally while l - k < delta_k, otherwise wait iff
/// k <= l zeta tau / (u T_k + zeta tau).
PositionVerdict renege_position(const TenantRequest& req, std::size_t position, std::size_t entry_length,
                                double elapsed, std::size_t delta_k);

/// Wait iff zeta tau - u w-bar >= 0; evaluated once at entrance.
RenegeDecision renege_avg_wait(const TenantRequest& req, double average_wait);

/// Predetermined maximal wait t_max = (risk zeta tau - u0) / u, clamped at 0.
/// Infinite risk factor (or u = 0) never reneges.
double renege_blind(const TenantRequest& req, double risk_factor);

enum class Outcome { accepted, reneged };

/// zeta_e: accepted -> zeta tau - u0 - u w; reneged -> -u0 - u w.
double end_profit(const TenantRequest& req, Outcome outcome, double wait);

} // namespace slicing::tenant
