#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace slicing::queueing {

/// One request queue: Poisson arrivals (lambda), an exogenous Poisson
/// acceptance process (mu) that removes the head, exponential reneging of
/// every waiting request (alpha) and exponential balking (beta).
struct QueueParams {
	double arrival_rate = 0.0;      // lambda
	double service_rate = 0.0;      // mu
	double reneging_rate = 0.0;     // alpha
	double balking_exponent = 0.0;  // beta

	double workload() const { return arrival_rate / service_rate; }             // rho
	double delta() const;                                                       // e^{-beta/mu}
	double gamma() const { return service_rate / reneging_rate; }              // mu/alpha, alpha > 0
	bool impatient() const { return reneging_rate > 0.0 || balking_exponent > 0.0; }
	void validate() const;
};

struct TruncationConfig {
	double series_tail_tol = 1e-14;  // relative
	std::size_t tail_run = 10;       // consecutive small terms before stopping
	std::size_t max_terms = 10000;
	double quadrature_abs_tol = 1e-9;
	int quadrature_max_depth = 50;
};

/// (1 - rho) rho^l. Throws DivergentQueue for rho >= 1.
double mm1_pmf(const QueueParams& params, std::size_t length);

/// L = lambda W.
double little_mean_length(double arrival_rate, double mean_wait);

/// M/M/1 waiting time, Exp(mu - lambda).
double wait_cdf(const QueueParams& params, double w);
double wait_pdf(const QueueParams& params, double w);

enum class BalkingModel { linear, hyperbolic, exponential };

/// Probability b of joining a queue of length l.
double balking_prob(BalkingModel model, const QueueParams& params, double length,
                    std::optional<double> max_length = std::nullopt);

/// Steady-state queue-length PMF with exponential balking and reneging:
///   p(l) = p(0) prod_{i=1}^{l} lambda delta^i / (mu + i alpha)
/// Without impatience this is the geometric M/M/1 PMF. The returned vector is
/// truncated where the tail falls below cfg.series_tail_tol and sums to 1.
std::vector<double> impatient_pmf(const QueueParams& params, const TruncationConfig& cfg = {});

/// Which arrival/acceptance bookkeeping join_accept_probs() uses.
///
/// `as_printed` takes p(j) as the length an arrival sees and treats an arrival
/// to an empty queue as admitted on the spot. `exogenous_service` is the
/// bookkeeping of the dynamics behind impatient_pmf(): an arrival that sees
/// j-1 waiting requests joins with probability delta^j, and needs j acceptance
/// events before its own patience expires, which happens with probability
/// mu / (mu + j alpha) = gamma / (gamma + j).
enum class JoinModel { as_printed, exogenous_service };

struct JoinAcceptProbs {
	double join = 0.0;              // P(J)
	double accept = 0.0;            // P(A)
	double accept_and_join = 0.0;   // P(A, J)
	double accept_given_join = 1.0; // P(A | J)
	bool degenerate = false;        // P(J) = 0, conditional reported as 1
};

JoinAcceptProbs join_accept_probs(const QueueParams& params, const TruncationConfig& cfg = {},
                                  JoinModel model = JoinModel::as_printed);

/// Waiting-time densities of joined requests: accepted (f_a), reneged (f_r)
/// and all joined (f_q), with their means. Requires alpha > 0.
///
/// f_a follows from the exogenous-service dynamics: a request that joins at
/// position j is accepted after a sum of Exp(mu + i alpha), i = 1..j. f_r and
/// f_q are built from f_a through g(W) = int_0^W e^{alpha xi} f_a(xi) dxi.
class WaitDensities {
public:
	WaitDensities(const QueueParams& params, const TruncationConfig& cfg = {});

	double accepted(double w) const;   // f_a
	double reneged(double w) const;    // f_r
	double queued(double w) const;     // f_q
	double g(double w) const;

	double mean_accepted() const { return mean_accepted_; }  // W_a
	double mean_reneged() const { return mean_reneged_; }    // W_r
	double mean_queued() const { return mean_queued_; }      // W_q = (1 - P(A|J)) / alpha
	const JoinAcceptProbs& probabilities() const { return probs_; }
	/// Integration domain [0, upper_limit()] used for all moments.
	double upper_limit() const { return upper_; }

	/// Adaptive quadrature over [0, upper_limit()].
	double integrate(const std::function<double(double)>& f) const;

private:
	QueueParams params_;
	TruncationConfig cfg_;
	JoinAcceptProbs probs_;
	double p0_ = 0.0;
	double upper_ = 0.0;
	std::vector<double> g_nodes_;   // g at node_step_ * i
	double node_step_ = 0.0;
	double mean_accepted_ = 0.0;
	double mean_reneged_ = 0.0;
	double mean_queued_ = 0.0;
};

WaitDensities wait_densities(const QueueParams& params, const TruncationConfig& cfg = {});

/// Adaptive Simpson with Richardson correction. Throws NumericError with the
/// interval and residual estimate when max_depth is exhausted.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol, int max_depth);

} // namespace slicing::queueing
