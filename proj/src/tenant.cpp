#include "slicing/tenant.hpp"

#include <algorithm>
#include <cmath>

#include "slicing/error.hpp"

namespace slicing::tenant {

double LifetimeDistribution::cdf(double t) const
{
	if (t <= 0.0)
		return 0.0;
	switch (kind) {
	case LifetimeKind::uniform:
		return std::min(1.0, t / parameter);
	case LifetimeKind::rational:
		return 1.0 - 1.0 / (t + 1.0);
	case LifetimeKind::pareto:
		return t < 1.0 ? 0.0 : 1.0 - 1.0 / t;
	case LifetimeKind::exponential:
		return -std::expm1(-parameter * t);
	}
	return 0.0;
}

double LifetimeDistribution::pdf(double t) const
{
	if (t < 0.0)
		return 0.0;
	switch (kind) {
	case LifetimeKind::uniform:
		return t <= parameter ? 1.0 / parameter : 0.0;
	case LifetimeKind::rational:
		return 1.0 / ((t + 1.0) * (t + 1.0));
	case LifetimeKind::pareto:
		return t < 1.0 ? 0.0 : 1.0 / (t * t);
	case LifetimeKind::exponential:
		return parameter * std::exp(-parameter * t);
	}
	return 0.0;
}

std::string KnowledgeRegime::name() const
{
	switch (kind) {
	case KnowledgeKind::patient:
		return "patient";
	case KnowledgeKind::blind:
		return "blind";
	case KnowledgeKind::position_only:
		return "position";
	case KnowledgeKind::avg_wait:
		return "avg_wait";
	case KnowledgeKind::serving_rate:
		return "serving_rate";
	case KnowledgeKind::full:
		return "full";
	}
	return "?";
}

void KnowledgeRegime::validate() const
{
	if (kind == KnowledgeKind::blind && !(risk_factor >= 0.0))
		throw InvalidInput("blind regime: risk factor must be >= 0");
	if (kind == KnowledgeKind::position_only && delta_k < 1)
		throw InvalidInput("position regime: delta_k must be >= 1");
}

KnowledgeRegime parse_regime(const std::string& name, double risk_factor, std::size_t delta_k)
{
	KnowledgeRegime r;
	if (name == "patient")
		r = KnowledgeRegime::patient();
	else if (name == "blind")
		r = KnowledgeRegime::blind(risk_factor);
	else if (name == "position" || name == "position_only")
		r = KnowledgeRegime::position_only(delta_k);
	else if (name == "avg_wait")
		r = KnowledgeRegime::avg_wait();
	else if (name == "serving_rate")
		r = KnowledgeRegime::serving_rate();
	else if (name == "full")
		r = KnowledgeRegime::full();
	else
		throw InvalidInput("unknown knowledge regime '" + name + "'");
	r.validate();
	return r;
}

QueueInfoView publish_view(const KnowledgeRegime& regime, const QueueInfoView& everything)
{
	QueueInfoView v;
	switch (regime.kind) {
	case KnowledgeKind::patient:
	case KnowledgeKind::blind:
		break;
	case KnowledgeKind::position_only:
		v.position = everything.position;
		v.length = everything.length;
		break;
	case KnowledgeKind::avg_wait:
		v.average_wait = everything.average_wait;
		break;
	case KnowledgeKind::serving_rate:
		v.position = everything.position;
		v.length = everything.length;
		v.serving_rate = everything.serving_rate;
		break;
	case KnowledgeKind::full:
		v.position = everything.position;
		v.length = everything.length;
		v.serving_rate = everything.serving_rate;
		v.reneging_rates = everything.reneging_rates;
		break;
	}
	return v;
}

BalkDecision balk_decision(const TenantRequest& req, std::size_t length, double serving_rate)
{
	if (!(serving_rate > 0.0))
		throw InvalidInput("balk_decision: serving rate must be > 0");
	const double margin = req.lifetime_profit() - req.issue_cost -
	                      req.waiting_cost_rate * static_cast<double>(length) / serving_rate;
	return margin >= 0.0 ? BalkDecision::issue : BalkDecision::balk;
}

double balking_chance(const LifetimeDistribution& dist, double length, double serving_rate, double waiting_cost_rate,
                      double profit_rate, double issue_cost)
{
	const double threshold = (issue_cost * serving_rate + waiting_cost_rate * length) / (serving_rate * profit_rate);
	return 1.0 - dist.cdf(threshold);
}

double balking_chance_closed_form(const LifetimeDistribution& dist, double length, double serving_rate,
                                  double waiting_cost_rate, double profit_rate)
{
	const double u = waiting_cost_rate;
	const double scale = serving_rate * profit_rate; // mu zeta
	switch (dist.kind) {
	case LifetimeKind::uniform:
		return std::clamp(1.0 - u * length / (scale * dist.parameter), 0.0, 1.0);
	case LifetimeKind::rational:
		return scale / (u * length + scale);
	case LifetimeKind::pareto:
		return length <= 0.0 ? 1.0 : std::min(1.0, scale / (u * length));
	case LifetimeKind::exponential:
		return std::exp(-dist.parameter * u / profit_rate * length / serving_rate);
	}
	return 1.0;
}

double expected_wait(std::size_t position, double serving_rate, const std::vector<double>& reneging_rates)
{
	double total = 0.0;
	double rate = serving_rate;
	for (std::size_t i = 0; i < position; ++i) {
		if (i >= 1 && i - 1 < reneging_rates.size())
			rate += reneging_rates[i - 1];
		total += 1.0 / rate;
	}
	return total;
}

RenegeDecision renege_full(const TenantRequest& req, std::size_t position, double serving_rate,
                           const std::vector<double>& reneging_rates)
{
	const double cost = req.waiting_cost_rate * expected_wait(position, serving_rate, reneging_rates);
	return req.lifetime_profit() - cost >= 0.0 ? RenegeDecision::wait : RenegeDecision::renege;
}

RenegeDecision renege_serving_rate(const TenantRequest& req, std::size_t position, double serving_rate)
{
	if (!(serving_rate > 0.0))
		throw InvalidInput("renege_serving_rate: serving rate must be > 0");
	// k <= mu zeta tau / u, written without dividing by u (u may be 0).
	return req.waiting_cost_rate * static_cast<double>(position) <= serving_rate * req.lifetime_profit()
	           ? RenegeDecision::wait
	           : RenegeDecision::renege;
}

PositionVerdict renege_position(const TenantRequest& req, std::size_t position, std::size_t entry_length,
                                double elapsed, std::size_t delta_k)
{
	if (position > entry_length)
		throw InvalidInput("renege_position: position " + std::to_string(position) + " is behind entry length " +
		                   std::to_string(entry_length));
	PositionVerdict verdict;
	if (position == 0 || entry_length - position < delta_k)
		return verdict;
	const double advanced = static_cast<double>(entry_length - position);
	const double profit = req.lifetime_profit();
	const double k = static_cast<double>(position);
	verdict.deadline = req.waiting_cost_rate > 0.0 ? profit * advanced / (req.waiting_cost_rate * k)
	                                               : std::numeric_limits<double>::infinity();
	// k <= l zeta tau / (u T + zeta tau)  <=>  k (u T + zeta tau) <= l zeta tau
	const double lhs = k * (req.waiting_cost_rate * elapsed + profit);
	const double rhs = static_cast<double>(entry_length) * profit;
	verdict.decision = lhs <= rhs ? RenegeDecision::wait : RenegeDecision::renege;
	return verdict;
}

RenegeDecision renege_avg_wait(const TenantRequest& req, double average_wait)
{
	return req.lifetime_profit() - req.waiting_cost_rate * average_wait >= 0.0 ? RenegeDecision::wait
	                                                                           : RenegeDecision::renege;
}

double renege_blind(const TenantRequest& req, double risk_factor)
{
	if (std::isinf(risk_factor) || req.waiting_cost_rate <= 0.0)
		return std::numeric_limits<double>::infinity();
	return std::max(0.0, (risk_factor * req.lifetime_profit() - req.issue_cost) / req.waiting_cost_rate);
}

double end_profit(const TenantRequest& req, Outcome outcome, double wait)
{
	if (wait < 0.0)
		throw InvalidInput("end_profit: negative waiting time");
	const double cost = req.issue_cost + req.waiting_cost_rate * wait;
	return outcome == Outcome::accepted ? req.lifetime_profit() - cost : -cost;
}

} // namespace slicing::tenant
