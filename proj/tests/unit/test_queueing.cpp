#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "slicing/error.hpp"
#include "slicing/queueing.hpp"
#include "slicing/simulation.hpp"
#include "support/oracles.hpp"

using namespace slicing;
using namespace slicing::queueing;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

/// Mean and batch-means standard error (50 batches).
std::pair<double, double> batch_mean(const std::vector<double>& x)
{
	const std::size_t batches = 50, size = x.size() / batches;
	std::vector<double> means;
	for (std::size_t b = 0; b < batches; ++b)
		means.push_back(std::accumulate(x.begin() + b * size, x.begin() + (b + 1) * size, 0.0) / size);
	const double m = sum(means) / batches;
	double var = 0.0;
	for (double v : means)
		var += (v - m) * (v - m);
	return {m, std::sqrt(var / (batches - 1) / batches)};
}

} // namespace

TEST_CASE("mm1_pmf")
{
	CHECK(mm1_pmf({1, 2, 0, 0}, 0) == doctest::Approx(0.5));
	CHECK(mm1_pmf({1, 2, 0, 0}, 3) == doctest::Approx(0.0625));
	CHECK_THROWS_AS(mm1_pmf({2, 2, 0, 0}, 0), DivergentQueue);
}

TEST_CASE("little_mean_length")
{
	CHECK(little_mean_length(2, 0.5) == doctest::Approx(1.0));
	CHECK(little_mean_length(0, 3) == 0.0);
	// M/M/1 at lambda 6, mu 8: W = 1/(mu - lambda) in system, L = rho/(1-rho) = 3.
	CHECK(little_mean_length(6, 1.0 / (8 - 6)) == doctest::Approx(3.0));
}

TEST_CASE("wait_cdf and wait_pdf")
{
	const QueueParams p{1, 2, 0, 0};
	CHECK(wait_cdf(p, -1) == 0.0);
	CHECK(wait_cdf(p, std::log(2.0)) == doctest::Approx(0.5));
	CHECK(wait_cdf(p, 1e6) == doctest::Approx(1.0));
	CHECK(wait_pdf(p, 0.0) == doctest::Approx(1.0));
	CHECK_THROWS_AS(wait_cdf({3, 2, 0, 0}, 1.0), DivergentQueue);
}

TEST_CASE("balking_prob models")
{
	const QueueParams p{1, 1, 0, 0.5};
	CHECK(balking_prob(BalkingModel::exponential, p, 0) == 1.0);
	CHECK(balking_prob(BalkingModel::exponential, p, 2) == doctest::Approx(std::exp(-1.0)));
	CHECK(balking_prob(BalkingModel::hyperbolic, p, 2) == doctest::Approx(0.25));
	CHECK(balking_prob(BalkingModel::hyperbolic, p, 0) == 1.0);
	CHECK(balking_prob(BalkingModel::linear, p, 5, 5.0) == 0.0);
	CHECK(balking_prob(BalkingModel::linear, p, 1, 4.0) == doctest::Approx(0.75));
	CHECK_THROWS_AS(balking_prob(BalkingModel::linear, p, 1), InvalidInput);
}

TEST_CASE("impatient_pmf closed form and normalization")
{
	const auto pmf = impatient_pmf({1, 1, 1, 0});
	CHECK(pmf[0] == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-12));
	CHECK(pmf[0] == doctest::Approx(0.581977).epsilon(1e-6));
	for (double lambda : {0.5, 1.0, 2.0, 7.0})
		for (double alpha : {0.0, 0.1, 1.0})
			for (double beta : {0.0, 0.5, 2.0}) {
				const QueueParams p{lambda, 1.0, alpha, beta};
				if (!p.impatient() && lambda >= 1.0)
					continue;
				CHECK(sum(impatient_pmf(p)) == doctest::Approx(1.0).epsilon(1e-12));
			}
	CHECK_THROWS_AS(impatient_pmf({2, 1, 0, 0}), DivergentQueue);
}

TEST_CASE("impatient_pmf recovers the geometric PMF as impatience vanishes")
{
	const auto pmf = impatient_pmf({0.5, 1.0, 1e-9, 1e-9});
	std::vector<double> geo;
	for (std::size_t l = 0; l < pmf.size() + 20; ++l)
		geo.push_back(0.5 * std::pow(0.5, static_cast<double>(l)));
	CHECK(oracle::tv_distance(pmf, geo) < 1e-6);
	const auto patient = impatient_pmf({0.5, 1.0, 0.0, 0.0});
	CHECK(oracle::tv_distance(patient, geo) < 1e-12);
}

TEST_CASE("impatient_pmf agrees with the balance-equation solve on the parameter grid")
{
	double worst = 0.0;
	for (double lambda : {0.5, 1.0, 2.0})
		for (double mu : {0.5, 1.0, 2.0})
			for (double alpha : {0.1, 1.0})
				for (double beta : {0.0, 0.5, 2.0}) {
					const QueueParams p{lambda, mu, alpha, beta};
					const double tv = oracle::tv_distance(impatient_pmf(p), oracle::balance_equation_pmf(p));
					worst = std::max(worst, tv);
					CHECK(tv <= 1e-8);
				}
	MESSAGE("worst TV " << worst);
}

TEST_CASE("p(0) is non-decreasing in alpha and beta")
{
	double prev = 0.0;
	for (double alpha : {0.0, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0}) {
		const double p0 = impatient_pmf({0.8, 1.0, alpha, 0.1}).front();
		CHECK(p0 >= prev - 1e-15);
		prev = p0;
	}
	prev = 0.0;
	for (double beta : {0.0, 0.05, 0.1, 0.5, 1.0, 2.0, 5.0}) {
		const double p0 = impatient_pmf({0.8, 1.0, 0.1, beta}).front();
		CHECK(p0 >= prev - 1e-15);
		prev = p0;
	}
}

TEST_CASE("join_accept_probs limits")
{
	for (auto model : {JoinModel::as_printed, JoinModel::exogenous_service}) {
		const auto inf = std::numeric_limits<double>::infinity();
		const auto balk = join_accept_probs({1, 1, 1, inf}, {}, model);
		CHECK(balk.join == doctest::Approx(0.0));
		CHECK(balk.degenerate);
		CHECK(balk.accept_given_join == 1.0);
		// Only the as_printed bookkeeping admits arrivals to an empty queue without joining.
		const double spot = model == JoinModel::as_printed ? impatient_pmf({1, 1, 1, inf}).front() : 0.0;
		CHECK(balk.accept == doctest::Approx(spot));

		const auto patient = join_accept_probs({1, 1, 1e-9, 0.5}, {}, model);
		CHECK(patient.accept_given_join == doctest::Approx(1.0).epsilon(1e-6));
		CHECK_FALSE(patient.degenerate);
		const double spot_patient = model == JoinModel::as_printed ? impatient_pmf({1, 1, 1e-9, 0.5}).front() : 0.0;
		CHECK(patient.accept == doctest::Approx(patient.accept_and_join + spot_patient));
	}
}

TEST_CASE("join_accept_probs and mean accepted wait against the Monte-Carlo oracle")
{
	const QueueParams p{1, 1, 1, 0.5};
	const auto sim = sim::isolated_queue_sim(p, 1e6, 2024);
	const double n = static_cast<double>(sim.arrivals);
	const double join = static_cast<double>(sim.joined) / n;
	const double accept = static_cast<double>(sim.accepted) / n;

	const auto exact = join_accept_probs(p, {}, JoinModel::exogenous_service);
	const double se_join = std::sqrt(join * (1 - join) / n);
	const double se_accept = std::sqrt(accept * (1 - accept) / n);
	CHECK(std::abs(join - exact.join) < 3 * se_join);
	CHECK(std::abs(accept - exact.accept) < 3 * se_accept);

	const auto [wa, se_wa] = batch_mean(sim.accepted_waits);
	const auto densities = wait_densities(p);
	CHECK(std::abs(wa - densities.mean_accepted()) < 3 * se_wa);

	const auto printed = join_accept_probs(p, {}, JoinModel::as_printed);
	MESSAGE("simulated P(J) " << join << " P(A) " << accept << " W_a " << wa << " +- " << se_wa);
	MESSAGE("exogenous model P(J) " << exact.join << " P(A) " << exact.accept << " W_a " << densities.mean_accepted());
	MESSAGE("as printed      P(J) " << printed.join << " P(A) " << printed.accept);
}

TEST_CASE("wait densities normalize and satisfy the moment identities")
{
	for (const QueueParams p : {QueueParams{1, 1, 1, 0.5}, QueueParams{2, 1, 0.5, 0.2}, QueueParams{0.5, 2, 0.1, 0.0}}) {
		const auto d = wait_densities(p);
		const double tol = d.upper_limit() > 0 ? 1e-6 : 0.0;
		CHECK(d.integrate([&](double w) { return d.accepted(w); }) == doctest::Approx(1.0).epsilon(tol));
		CHECK(d.integrate([&](double w) { return d.reneged(w); }) == doctest::Approx(1.0).epsilon(tol));
		CHECK(d.integrate([&](double w) { return d.queued(w); }) == doctest::Approx(1.0).epsilon(tol));
		const double wq = d.integrate([&](double w) { return w * d.queued(w); });
		CHECK(wq == doctest::Approx(d.mean_queued()).epsilon(1e-4));
		CHECK(d.mean_queued() * p.reneging_rate + d.probabilities().accept_given_join == doctest::Approx(1.0).epsilon(1e-15));
		CHECK(d.mean_accepted() > 0.0);
		CHECK(d.mean_reneged() > 0.0);
		CHECK(d.accepted(0.3) >= 0.0);
		CHECK(d.reneged(0.3) >= 0.0);
	}
	CHECK_THROWS_AS(wait_densities({1, 1, 0, 0.5}), InvalidInput);
}

TEST_CASE("adaptive_simpson")
{
	CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0, M_PI, 1e-12, 50) == doctest::Approx(2.0).epsilon(1e-10));
	CHECK_THROWS_AS(adaptive_simpson([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0, 1, 1e-14, 3),
	                NumericError);
}
