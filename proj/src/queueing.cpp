#include "slicing/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "slicing/error.hpp"

namespace slicing::queueing {

double QueueParams::delta() const
{
	if (balking_exponent == 0.0)
		return 1.0;
	return std::exp(-balking_exponent / service_rate);
}

void QueueParams::validate() const
{
	auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
	if (!finite_nonneg(arrival_rate) || !(arrival_rate > 0.0))
		throw InvalidInput("queue: arrival rate must be > 0");
	if (!finite_nonneg(service_rate) || !(service_rate > 0.0))
		throw InvalidInput("queue: service rate must be > 0");
	if (!finite_nonneg(reneging_rate))
		throw InvalidInput("queue: reneging rate must be >= 0");
	if (!(balking_exponent >= 0.0))
		throw InvalidInput("queue: balking exponent must be >= 0");
}

namespace {

void require_patient_stable(const QueueParams& params)
{
	params.validate();
	if (params.impatient())
		throw InvalidInput("M/M/1 formula requires alpha = beta = 0");
	if (params.workload() >= 1.0)
		throw DivergentQueue("queue diverges: rho = " + std::to_string(params.workload()) + " >= 1");
}

} // namespace

double mm1_pmf(const QueueParams& params, std::size_t length)
{
	require_patient_stable(params);
	const double rho = params.workload();
	return (1.0 - rho) * std::pow(rho, static_cast<double>(length));
}

double little_mean_length(double arrival_rate, double mean_wait)
{
	if (arrival_rate < 0.0 || mean_wait < 0.0)
		throw InvalidInput("little_mean_length: inputs must be >= 0");
	return arrival_rate * mean_wait;
}

double wait_cdf(const QueueParams& params, double w)
{
	require_patient_stable(params);
	if (w < 0.0)
		return 0.0;
	return -std::expm1(-(params.service_rate - params.arrival_rate) * w);
}

double wait_pdf(const QueueParams& params, double w)
{
	require_patient_stable(params);
	if (w < 0.0)
		return 0.0;
	const double r = params.service_rate - params.arrival_rate;
	return r * std::exp(-r * w);
}

double balking_prob(BalkingModel model, const QueueParams& params, double length, std::optional<double> max_length)
{
	if (length < 0.0)
		throw InvalidInput("balking_prob: negative queue length");
	switch (model) {
	case BalkingModel::linear:
		if (!max_length || !(*max_length > 0.0))
			throw InvalidInput("linear balking needs a positive maximum length");
		return std::clamp(1.0 - length / *max_length, 0.0, 1.0);
	case BalkingModel::hyperbolic:
		if (length == 0.0)
			return 1.0;
		return std::min(params.balking_exponent / length, 1.0);
	case BalkingModel::exponential:
		return std::exp(-params.balking_exponent * length / params.service_rate);
	}
	return 1.0;
}

std::vector<double> impatient_pmf(const QueueParams& params, const TruncationConfig& cfg)
{
	params.validate();
	if (!params.impatient() && params.workload() >= 1.0)
		throw DivergentQueue("queue diverges: rho = " + std::to_string(params.workload()) + " >= 1");

	const double log_lambda = std::log(params.arrival_rate);
	const double log_delta = params.balking_exponent == 0.0 ? 0.0 : -params.balking_exponent / params.service_rate;

	// Unnormalized log p(l) / p(0). Once the ratio lambda delta^l / (mu + l alpha)
	// drops below one it keeps falling, so a run of negligible terms past that
	// point bounds the tail.
	std::vector<double> logs{0.0};
	double max_log = 0.0;
	double sum = 1.0; // relative to exp(max_log)
	std::size_t small_run = 0;
	for (std::size_t l = 1;; ++l) {
		if (l > cfg.max_terms) {
			std::ostringstream msg;
			msg << "impatient_pmf: series did not converge within " << cfg.max_terms << " terms";
			throw NumericError(msg.str());
		}
		const double dl = static_cast<double>(l);
		const double log_ratio = log_lambda + dl * log_delta - std::log(params.service_rate + dl * params.reneging_rate);
		const double term = logs.back() + log_ratio;
		logs.push_back(term);
		if (term > max_log) {
			sum = sum * std::exp(max_log - term) + 1.0;
			max_log = term;
		} else {
			sum += std::exp(term - max_log);
		}
		const double rel = std::exp(term - max_log) / sum;
		if (log_ratio < 0.0 && rel < cfg.series_tail_tol) {
			if (++small_run >= cfg.tail_run)
				break;
		} else {
			small_run = 0;
		}
	}

	std::vector<double> pmf(logs.size());
	double total = 0.0;
	for (std::size_t l = 0; l < logs.size(); ++l) {
		pmf[l] = std::exp(logs[l] - max_log);
		total += pmf[l];
	}
	for (double& p : pmf)
		p /= total;
	return pmf;
}

JoinAcceptProbs join_accept_probs(const QueueParams& params, const TruncationConfig& cfg, JoinModel model)
{
	const auto pmf = impatient_pmf(params, cfg);
	const double mu = params.service_rate;
	const double alpha = params.reneging_rate;
	const double log_delta = params.balking_exponent == 0.0 ? 0.0 : -params.balking_exponent / mu;

	JoinAcceptProbs out;
	// Index of the PMF entry that weighs "joins at position j".
	const std::size_t shift = model == JoinModel::exogenous_service ? 1 : 0;
	for (std::size_t j = 1; j - shift < pmf.size(); ++j) {
		const double dj = static_cast<double>(j);
		const double weight = pmf[j - shift] * std::exp(dj * log_delta);
		out.join += weight;
		out.accept_and_join += weight * mu / (mu + dj * alpha);
	}
	out.accept = model == JoinModel::as_printed ? pmf[0] + out.accept_and_join : out.accept_and_join;
	if (out.join > 0.0) {
		out.accept_given_join = out.accept_and_join / out.join;
	} else {
		out.accept_given_join = 1.0;
		out.degenerate = true;
	}
	return out;
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth, double& worst)
{
	const double m = 0.5 * (a + b);
	const double lm = 0.5 * (a + m);
	const double rm = 0.5 * (m + b);
	const double flm = f(lm);
	const double frm = f(rm);
	const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
	const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
	const double diff = left + right - whole;
	if (std::abs(diff) <= 15.0 * tol)
		return left + right + diff / 15.0;
	if (depth <= 0) {
		std::ostringstream msg;
		msg << "quadrature did not converge on [" << a << ", " << b << "], residual " << std::abs(diff) / 15.0
		    << " > tolerance " << tol;
		throw NumericError(msg.str());
	}
	worst = std::max(worst, std::abs(diff));
	return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, worst) +
	       simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, worst);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth)
{
	if (!(abs_tol > 0.0))
		throw InvalidInput("quadrature tolerance must be > 0");
	if (a == b)
		return 0.0;
	const double fa = f(a);
	const double fb = f(b);
	const double fm = f(0.5 * (a + b));
	const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
	double worst = 0.0;
	return simpson_step(f, a, b, fa, fm, fb, whole, abs_tol, max_depth, worst);
}

namespace {

constexpr std::size_t g_node_count = 512;
constexpr std::size_t quadrature_segments = 64;

// S(x) = sum_{j>=1} (lambda x / alpha)^{j-1} delta^{j(j+1)/2} / (j-1)!
double accepted_series(double z, double log_delta, const TruncationConfig& cfg)
{
	double sum = 0.0;
	double log_term_base = 0.0; // log of z^{j-1}/(j-1)!
	const double log_z = z > 0.0 ? std::log(z) : -std::numeric_limits<double>::infinity();
	std::size_t small_run = 0;
	for (std::size_t j = 1; j <= cfg.max_terms; ++j) {
		const double dj = static_cast<double>(j);
		if (j > 1)
			log_term_base += log_z - std::log(dj - 1.0);
		const double term = std::exp(log_term_base + 0.5 * dj * (dj + 1.0) * log_delta);
		sum += term;
		if (j == 1 && z == 0.0)
			break;
		// Terms are eventually decreasing once j - 1 > z.
		if (dj - 1.0 > z && term <= cfg.series_tail_tol * sum) {
			if (++small_run >= cfg.tail_run)
				break;
		} else {
			small_run = 0;
		}
	}
	return sum;
}

} // namespace

WaitDensities::WaitDensities(const QueueParams& params, const TruncationConfig& cfg) : params_(params), cfg_(cfg)
{
	params.validate();
	if (!(params.reneging_rate > 0.0))
		throw InvalidInput("wait densities require a reneging rate > 0");
	p0_ = impatient_pmf(params, cfg).front();
	probs_ = join_accept_probs(params, cfg, JoinModel::exogenous_service);
	if (!(probs_.accept_and_join > 0.0))
		throw NumericError("wait densities: acceptance probability of joined requests is zero");

	// The reneged density carries the slowest envelope, alpha e^{-alpha W}.
	upper_ = -std::log(1e-12 * 1e-2) / params.reneging_rate;
	node_step_ = upper_ / static_cast<double>(g_node_count);
	g_nodes_.assign(g_node_count + 1, 0.0);
	const double mu = params.service_rate;
	auto g_integrand = [this, mu](double xi) {
		// e^{alpha xi} f_a(xi)
		const double alpha = params_.reneging_rate;
		const double log_delta = params_.balking_exponent == 0.0 ? 0.0 : -params_.balking_exponent / mu;
		const double z = params_.arrival_rate / alpha * -std::expm1(-alpha * xi);
		return p0_ * mu * std::exp(-mu * xi) * accepted_series(z, log_delta, cfg_) / probs_.accept_and_join;
	};
	const double node_tol = cfg.quadrature_abs_tol / static_cast<double>(g_node_count);
	for (std::size_t i = 1; i <= g_node_count; ++i)
		g_nodes_[i] = g_nodes_[i - 1] + adaptive_simpson(g_integrand, node_step_ * static_cast<double>(i - 1),
		                                                 node_step_ * static_cast<double>(i), node_tol,
		                                                 cfg.quadrature_max_depth);

	mean_accepted_ = integrate([this](double w) { return w * accepted(w); });
	const double pa = probs_.accept_given_join;
	mean_reneged_ = pa < 1.0 ? 1.0 / params.reneging_rate - pa * mean_accepted_ / (1.0 - pa) : 0.0;
	mean_queued_ = (1.0 - pa) / params.reneging_rate;
}

double WaitDensities::accepted(double w) const
{
	if (w < 0.0)
		return 0.0;
	const double mu = params_.service_rate;
	const double alpha = params_.reneging_rate;
	const double log_delta = params_.balking_exponent == 0.0 ? 0.0 : -params_.balking_exponent / mu;
	const double z = params_.arrival_rate / alpha * -std::expm1(-alpha * w);
	return p0_ * mu * std::exp(-(mu + alpha) * w) * accepted_series(z, log_delta, cfg_) / probs_.accept_and_join;
}

double WaitDensities::g(double w) const
{
	if (w <= 0.0)
		return 0.0;
	auto integrand = [this](double xi) { return std::exp(params_.reneging_rate * xi) * accepted(xi); };
	if (w >= upper_) {
		// Beyond the grid the integrand is below e^{-mu W}, negligible.
		return g_nodes_.back();
	}
	const auto i = static_cast<std::size_t>(w / node_step_);
	const double base = node_step_ * static_cast<double>(i);
	return g_nodes_[i] + adaptive_simpson(integrand, base, w, cfg_.quadrature_abs_tol / g_node_count,
	                                      cfg_.quadrature_max_depth);
}

double WaitDensities::reneged(double w) const
{
	if (w < 0.0)
		return 0.0;
	const double pa = probs_.accept_given_join;
	if (pa >= 1.0)
		return 0.0;
	const double alpha = params_.reneging_rate;
	return alpha * std::exp(-alpha * w) * std::max(0.0, 1.0 - pa * g(w)) / (1.0 - pa);
}

double WaitDensities::queued(double w) const
{
	if (w < 0.0)
		return 0.0;
	const double pa = probs_.accept_given_join;
	const double alpha = params_.reneging_rate;
	const double e = alpha * std::exp(-alpha * w);
	return pa * (accepted(w) - e * g(w)) + e;
}

double WaitDensities::integrate(const std::function<double(double)>& f) const
{
	const double step = upper_ / static_cast<double>(quadrature_segments);
	const double tol = cfg_.quadrature_abs_tol / static_cast<double>(quadrature_segments);
	double total = 0.0;
	for (std::size_t i = 0; i < quadrature_segments; ++i)
		total += adaptive_simpson(f, step * static_cast<double>(i), step * static_cast<double>(i + 1), tol,
		                          cfg_.quadrature_max_depth);
	return total;
}

WaitDensities wait_densities(const QueueParams& params, const TruncationConfig& cfg)
{
	return WaitDensities(params, cfg);
}

} // namespace slicing::queueing
