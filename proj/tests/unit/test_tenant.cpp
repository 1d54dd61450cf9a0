#include <doctest.h>

#include <cmath>
#include <limits>

#include "slicing/error.hpp"
#include "slicing/queueing.hpp"
#include "slicing/rng.hpp"
#include "slicing/stats.hpp"
#include "slicing/tenant.hpp"

using namespace slicing;
using namespace slicing::tenant;

namespace {

TenantRequest req(double zeta, double tau, double u, double u0 = 0.0)
{
	TenantRequest r;
	r.profit_rate = zeta;
	r.lifetime = tau;
	r.waiting_cost_rate = u;
	r.issue_cost = u0;
	return r;
}

} // namespace

TEST_CASE("lifetime distributions integrate to one")
{
	for (const auto& d : {LifetimeDistribution::uniform(3.0), LifetimeDistribution::rational(),
	                      LifetimeDistribution::pareto(), LifetimeDistribution::exponential(0.5)}) {
		double mass = 0.0;
		const double h = 1e-3;
		for (double t = h / 2; t < 200.0; t += h)
			mass += d.pdf(t) * h;
		mass += 1.0 - d.cdf(200.0);
		CHECK(mass == doctest::Approx(1.0).epsilon(2e-3));
		CHECK(d.cdf(-1.0) == 0.0);
	}
}

TEST_CASE("balk_decision")
{
	CHECK(balk_decision(req(8, 5, 1), 10, 1.0) == BalkDecision::issue);
	CHECK(balk_decision(req(8, 5, 1), 0, 1.0) == BalkDecision::issue);
	CHECK(balk_decision(req(8, 5, 1, 41), 0, 1.0) == BalkDecision::balk);
	CHECK(balk_decision(req(8, 5, 1), 40, 1.0) == BalkDecision::issue); // tie issues
	CHECK(balk_decision(req(8, 5, 1), 41, 1.0) == BalkDecision::balk);
	CHECK_THROWS_AS(balk_decision(req(8, 5, 1), 1, 0.0), InvalidInput);
}

TEST_CASE("balking_chance closed forms")
{
	const auto ex = LifetimeDistribution::exponential(0.2);
	CHECK(balking_chance_closed_form(ex, 0, 1, 1, 8) == 1.0);
	CHECK(balking_chance_closed_form(LifetimeDistribution::rational(), 8, 1, 1, 8) == doctest::Approx(0.5));
	CHECK(balking_chance_closed_form(LifetimeDistribution::uniform(2.0), 16, 1, 1, 8) == doctest::Approx(0.0));
	CHECK(balking_chance_closed_form(LifetimeDistribution::pareto(), 0, 1, 1, 8) == 1.0);
	CHECK(balking_chance_closed_form(LifetimeDistribution::pareto(), 16, 1, 1, 8) == doctest::Approx(0.5));
	for (const auto& d : {LifetimeDistribution::uniform(6.0), LifetimeDistribution::rational(),
	                      LifetimeDistribution::pareto(), ex})
		for (double l : {0.0, 1.0, 3.0, 7.5, 20.0, 60.0})
			CHECK(balking_chance(d, l, 1.3, 1.5, 12.0) == doctest::Approx(balking_chance_closed_form(d, l, 1.3, 1.5, 12.0)));
}

TEST_CASE("balking_chance is non-increasing in l with b(0) = 1")
{
	for (const auto& d : {LifetimeDistribution::uniform(6.0), LifetimeDistribution::rational(),
	                      LifetimeDistribution::pareto(), LifetimeDistribution::exponential(0.3)}) {
		CHECK(balking_chance(d, 0.0, 1.0, 1.0, 8.0) == 1.0);
		double prev = 1.0;
		for (double l = 0.0; l < 100.0; l += 0.5) {
			const double b = balking_chance(d, l, 1.0, 1.0, 8.0);
			CHECK(b <= prev + 1e-15);
			prev = b;
		}
	}
}

TEST_CASE("empirical balk rate over lifetime draws matches b(l)")
{
	Rng rng(12);
	const double eta = 0.2, mu = 1.5, u = 1.0, zeta = 8.0;
	for (std::size_t l : {1, 5, 20, 60}) {
		const int n = 40000;
		int issued = 0;
		for (int i = 0; i < n; ++i)
			issued += balk_decision(req(zeta, rng.exponential(eta), u), l, mu) == BalkDecision::issue;
		const double b = balking_chance(LifetimeDistribution::exponential(eta), static_cast<double>(l), mu, u, zeta);
		CHECK(std::abs(issued / double(n) - b) < 4 * std::sqrt(b * (1 - b) / n) + 1e-12);
		// The exponential model is the exponential balking factor with beta = eta u / zeta.
		const queueing::QueueParams p{1.0, mu, 0.0, eta * u / zeta};
		CHECK(queueing::balking_prob(queueing::BalkingModel::exponential, p, static_cast<double>(l)) == doctest::Approx(b));
	}
}

TEST_CASE("expected_wait and renege_full")
{
	CHECK(expected_wait(3, 1.0, {1.0, 1.0}) == doctest::Approx(1.0 + 0.5 + 1.0 / 3.0));
	CHECK(expected_wait(4, 2.0, {}) == doctest::Approx(2.0));
	CHECK(expected_wait(0, 2.0, {1.0}) == 0.0);
	CHECK(renege_full(req(8, 5, 1), 40, 1.0, {}) == RenegeDecision::wait);
	CHECK(renege_full(req(8, 5, 1), 41, 1.0, {}) == RenegeDecision::renege);
	CHECK(renege_full(req(1e9, 5, 1), 1000, 0.1, {}) == RenegeDecision::wait);
}

TEST_CASE("renege_serving_rate")
{
	CHECK(renege_serving_rate(req(8, 5, 1), 40, 1.0) == RenegeDecision::wait);
	CHECK(renege_serving_rate(req(8, 5, 1), 41, 1.0) == RenegeDecision::renege);
	CHECK(renege_serving_rate(req(8, 5, 1), 0, 1.0) == RenegeDecision::wait);
	CHECK(renege_serving_rate(req(8, 5, 1e12), 1, 1.0) == RenegeDecision::renege);
}

TEST_CASE("renege_position")
{
	const auto r = req(8, 5, 1);
	const auto off = renege_position(r, 9, 10, 1e9, 2);
	CHECK(off.decision == RenegeDecision::wait);
	CHECK_FALSE(off.deadline.has_value());
	const auto on = renege_position(r, 5, 10, 0.0, 2);
	REQUIRE(on.deadline.has_value());
	CHECK(*on.deadline == doctest::Approx(40.0));
	CHECK(on.decision == RenegeDecision::wait);
	CHECK(renege_position(r, 5, 10, 40.0, 2).decision == RenegeDecision::wait);
	CHECK(renege_position(r, 5, 10, 40.0001, 2).decision == RenegeDecision::renege);
	CHECK(renege_position(r, 5, 10, 1e12, 2).decision == RenegeDecision::renege);
	CHECK_THROWS_AS(renege_position(r, 11, 10, 0.0, 2), InvalidInput);
}

TEST_CASE("renege_avg_wait")
{
	CHECK(renege_avg_wait(req(8, 5, 1), 0.0) == RenegeDecision::wait);
	CHECK(renege_avg_wait(req(8, 5, 1), 40.0) == RenegeDecision::wait);
	CHECK(renege_avg_wait(req(8, 5, 1), 41.0) == RenegeDecision::renege);
}

TEST_CASE("renege_blind")
{
	CHECK(renege_blind(req(8, 5, 1), 0.1) == doctest::Approx(4.0));
	CHECK(renege_blind(req(8, 5, 1), 0.0) == 0.0);
	CHECK(renege_blind(req(8, 5, 1, 100), 0.1) == 0.0);
	CHECK(std::isinf(renege_blind(req(8, 5, 1), std::numeric_limits<double>::infinity())));
}

TEST_CASE("blind deadlines with exponential lifetimes are exponential")
{
	Rng rng(8);
	const double eta = 0.2, zeta = 8.0, u = 1.0, risk = 0.1;
	std::vector<double> tmax;
	for (int i = 0; i < 100000; ++i)
		tmax.push_back(renege_blind(req(zeta, rng.exponential(eta), u), risk));
	const auto fit = stats::fit_exponential(tmax);
	// t_max = risk zeta tau / u, so its rate is eta u / (risk zeta).
	CHECK(fit.parameter == doctest::Approx(eta * u / (risk * zeta)).epsilon(0.02));
	CHECK(fit.tail_diagnostic == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("end_profit")
{
	CHECK(end_profit(req(8, 5, 1), Outcome::accepted, 2.0) == doctest::Approx(38.0));
	CHECK(end_profit(req(8, 5, 1.5), Outcome::reneged, 4.0) == doctest::Approx(-6.0));
	CHECK(end_profit(req(8, 5, 1), Outcome::accepted, 0.0) == doctest::Approx(40.0));
	CHECK_THROWS_AS(end_profit(req(8, 5, 1), Outcome::accepted, -1.0), InvalidInput);
}

TEST_CASE("regime dominance: full waits whenever serving-rate waits")
{
	Rng rng(21);
	for (int i = 0; i < 20000; ++i) {
		const auto r = req(1.0 + 10.0 * rng.uniform(), rng.exponential(0.3), 0.1 + 2.0 * rng.uniform());
		const std::size_t k = 1 + rng.index(60);
		const double mu = 0.1 + 5.0 * rng.uniform();
		std::vector<double> omega;
		for (std::size_t j = 0; j < k; ++j)
			omega.push_back(rng.uniform() < 0.3 ? 0.0 : rng.exponential(1.0));
		CHECK(expected_wait(k, mu, omega) <= k / mu + 1e-12);
		if (renege_serving_rate(r, k, mu) == RenegeDecision::wait)
			CHECK(renege_full(r, k, mu, omega) == RenegeDecision::wait);
	}
}

TEST_CASE("full knowledge with static estimates: a joined request never reneges")
{
	Rng rng(22);
	for (int i = 0; i < 2000; ++i) {
		const auto r = req(8.0, rng.exponential(0.2), 1.0);
		const double mu = 0.5 + rng.uniform();
		const std::vector<double> omega{0.1, 0.2, 0.05, 0.3, 0.0, 0.1};
		std::size_t k = 1 + rng.index(30);
		if (renege_full(r, k, mu, omega) == RenegeDecision::renege)
			continue;
		for (; k >= 1; --k)
			CHECK(renege_full(r, k, mu, omega) == RenegeDecision::wait);
	}
}

TEST_CASE("balking is reneging at t = 0 for the balking regimes")
{
	Rng rng(23);
	for (int i = 0; i < 5000; ++i) {
		const auto r = req(8.0, rng.exponential(0.2), 1.0 + rng.uniform());
		const std::size_t l = 1 + rng.index(80);
		const double mu = 0.2 + 3.0 * rng.uniform();
		const bool issues = balk_decision(r, l, mu) == BalkDecision::issue;
		CHECK(issues == (renege_serving_rate(r, l, mu) == RenegeDecision::wait));
		CHECK(issues == (renege_full(r, l, mu, {}) == RenegeDecision::wait));
		CHECK(issues == (renege_avg_wait(r, l / mu) == RenegeDecision::wait));
	}
	CHECK_FALSE(KnowledgeRegime::position_only(2).balks());
	CHECK_FALSE(KnowledgeRegime::blind(0.1).balks());
	CHECK_FALSE(KnowledgeRegime::patient().balks());
	CHECK(KnowledgeRegime::full().balks());
	CHECK(KnowledgeRegime::serving_rate().balks());
	CHECK(KnowledgeRegime::avg_wait().balks());
}

TEST_CASE("publish_view exposes only what a regime may see")
{
	QueueInfoView all;
	all.position = 3;
	all.length = 7;
	all.serving_rate = 1.2;
	all.reneging_rates = {0.1, 0.2};
	all.average_wait = 4.0;
	const auto patient = publish_view(KnowledgeRegime::patient(), all);
	CHECK_FALSE(patient.position.has_value());
	CHECK_FALSE(patient.average_wait.has_value());
	const auto pos = publish_view(KnowledgeRegime::position_only(2), all);
	CHECK(pos.position == std::optional<std::size_t>(3));
	CHECK_FALSE(pos.serving_rate.has_value());
	const auto avg = publish_view(KnowledgeRegime::avg_wait(), all);
	CHECK(avg.average_wait == std::optional<double>(4.0));
	CHECK_FALSE(avg.position.has_value());
	const auto sr = publish_view(KnowledgeRegime::serving_rate(), all);
	CHECK(sr.serving_rate.has_value());
	CHECK(sr.reneging_rates.empty());
	const auto full = publish_view(KnowledgeRegime::full(), all);
	CHECK(full.reneging_rates.size() == 2);
	CHECK_FALSE(full.average_wait.has_value());
}

TEST_CASE("regime parsing")
{
	CHECK(parse_regime("blind", 0.1).risk_factor == 0.1);
	CHECK(parse_regime("position", 0.01, 3).delta_k == 3);
	CHECK(parse_regime("full").name() == "full");
	CHECK_THROWS_AS(parse_regime("psychic"), InvalidInput);
	CHECK_THROWS_AS(parse_regime("blind", -1.0), InvalidInput);
	CHECK_THROWS_AS(parse_regime("position", 0.01, 0), InvalidInput);
}
