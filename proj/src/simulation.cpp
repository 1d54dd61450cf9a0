#include "slicing/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <queue>
#include <thread>
#include <unordered_map>

#include "slicing/error.hpp"

namespace slicing::sim {

InitialState parse_initial_state(const std::string& name)
{
	if (name == "empty")
		return InitialState::empty;
	if (name == "random_feasible")
		return InitialState::random_feasible;
	if (name == "random_full")
		return InitialState::random_full;
	throw InvalidInput("unknown initial state '" + name + "' (empty|random_feasible|random_full)");
}

const char* to_string(InitialState s)
{
	switch (s) {
	case InitialState::empty:
		return "empty";
	case InitialState::random_feasible:
		return "random_feasible";
	case InitialState::random_full:
		return "random_full";
	}
	return "?";
}

const char* to_string(RequestFate f)
{
	switch (f) {
	case RequestFate::accepted:
		return "accepted";
	case RequestFate::reneged:
		return "reneged";
	case RequestFate::balked:
		return "balked";
	case RequestFate::cap_rejected:
		return "cap_rejected";
	case RequestFate::waiting:
		return "waiting";
	}
	return "?";
}

void SimConfig::validate() const
{
	if (!(horizon > 0.0) || !std::isfinite(horizon))
		throw InvalidInput("horizon must be a positive number of periods");
	if (replications < 1)
		throw InvalidInput("replication count must be >= 1");
	if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0))
		throw InvalidInput("warmup fraction must be in [0, 1)");
	regime.validate();
}

double RunMetrics::mean_joined_wait() const
{
	double total = 0.0;
	std::size_t n = 0;
	for (const auto& r : requests)
		if (r.issued()) {
			total += r.wait;
			++n;
		}
	return n ? total / static_cast<double>(n) : 0.0;
}

double RunMetrics::admission_rate() const
{
	std::size_t arrivals = 0;
	std::size_t accepted = 0;
	for (const auto& c : counts) {
		arrivals += c.arrivals;
		accepted += c.acceptances;
	}
	return arrivals ? static_cast<double>(accepted) / static_cast<double>(arrivals) : 0.0;
}

std::vector<double> RunMetrics::mean_active(const RegionIndex& region) const
{
	std::vector<double> out(region.type_count(), 0.0);
	if (!(measured_time > 0.0))
		return out;
	for (std::size_t j = 0; j < occupancy.size(); ++j) {
		const auto& s = region.index_to_state(j);
		for (std::size_t n = 0; n < out.size(); ++n)
			out[n] += occupancy[j] * s[n];
	}
	for (double& v : out)
		v /= measured_time;
	return out;
}

std::vector<double> RunMetrics::end_profits(std::size_t slice_type) const
{
	std::vector<double> out;
	for (const auto& r : requests)
		if (r.slice_type == slice_type && r.issued())
			out.push_back(r.end_profit);
	return out;
}

std::vector<double> RunMetrics::renege_waits(std::size_t slice_type) const
{
	std::vector<double> out;
	for (const auto& r : requests)
		if (r.slice_type == slice_type && r.fate == RequestFate::reneged)
			out.push_back(r.wait);
	return out;
}

bool conserves(const RunMetrics& m)
{
	for (const auto& c : m.counts)
		if (c.arrivals != c.balks + c.reneges + c.acceptances + c.cap_rejections + c.waiting)
			return false;
	return true;
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t replication)
{
	return derive_seed(master_seed, {0x5EED, static_cast<std::uint64_t>(replication)});
}

SystemState draw_initial_state(const RegionIndex& region, InitialState kind, Rng& rng)
{
	switch (kind) {
	case InitialState::empty:
		return SystemState::zero(region.type_count());
	case InitialState::random_feasible:
		return region.feasible().at(rng.index(region.feasible().size()));
	case InitialState::random_full: {
		const auto full = region.saturated();
		if (full.empty())
			return SystemState::zero(region.type_count());
		return full.at(rng.index(full.size()));
	}
	}
	return SystemState::zero(region.type_count());
}

namespace {

enum class EventKind { release = 0, arrival = 1, renege_deadline = 2 };

struct Event {
	double time = 0.0;
	EventKind kind = EventKind::arrival;
	std::uint64_t seq = 0;
	std::size_t slice_type = 0;
	std::uint64_t request = 0;
	std::uint64_t version = 0;
};

struct EventLater {
	bool operator()(const Event& a, const Event& b) const
	{
		if (a.time != b.time)
			return a.time > b.time;
		if (a.kind != b.kind)
			return static_cast<int>(a.kind) > static_cast<int>(b.kind);
		return a.seq > b.seq;
	}
};

/// MNO-side running estimates published to tenants, one per controller queue.
struct QueueEstimates {
	double busy_time = 0.0;
	std::size_t served_from_queue = 0; // acceptances with a positive wait
	std::vector<double> time_at_length;
	std::vector<std::size_t> reneges_at_position; // index i = position i (1-based), slot 0 unused
	double accepted_wait_sum = 0.0;
	std::size_t accepted = 0;

	static constexpr std::size_t warm_acceptances = 10;

	std::optional<double> serving_rate() const
	{
		if (accepted < warm_acceptances || served_from_queue == 0 || !(busy_time > 0.0))
			return std::nullopt;
		return static_cast<double>(served_from_queue) / busy_time;
	}

	/// omega-hat_i for i = 1 .. count.
	std::vector<double> reneging_rates(std::size_t count) const
	{
		std::vector<double> out(count, 0.0);
		double occupied = 0.0;
		// time with length >= i, accumulated from the top
		std::vector<double> at_least(std::max(time_at_length.size(), count + 1) + 1, 0.0);
		for (std::size_t l = time_at_length.size(); l-- > 0;) {
			occupied += time_at_length[l];
			at_least[l] = occupied;
		}
		for (std::size_t i = 1; i <= count; ++i) {
			const std::size_t reneges = i < reneges_at_position.size() ? reneges_at_position[i] : 0;
			if (reneges > 0 && at_least[i] > 0.0)
				out[i - 1] = static_cast<double>(reneges) / at_least[i];
		}
		return out;
	}

	double average_wait() const { return accepted ? accepted_wait_sum / static_cast<double>(accepted) : 0.0; }
};

struct Live {
	std::size_t queue = 0;
	std::uint64_t version = 0;
	std::size_t last_position = 0;
	double position_since = 0.0; // time the current position was reached
};

class Simulator {
public:
	Simulator(const Scenario& scenario, const RegionIndex& region, const SimConfig& config, std::uint64_t seed)
		: scenario_(scenario), region_(region), config_(config), seed_(seed)
	{
		config.validate();
		const std::size_t n = scenario.type_count();
		metrics_.seed = seed;
		metrics_.horizon = config.horizon;
		measure_from_ = config.horizon * config.warmup_fraction;
		metrics_.measured_time = config.horizon - measure_from_;
		metrics_.counts.assign(n, {});
		metrics_.acceptance_times.assign(n, {});
		metrics_.occupancy.assign(region.size(), 0.0);
		metrics_.max_assigned.assign(scenario.resource_count(), 0.0);
		for (std::size_t t = 0; t < n; ++t) {
			arrival_rng_.emplace_back(derive_seed(seed, {static_cast<std::uint64_t>(Stream::arrivals), t}));
			lifetime_rng_.emplace_back(derive_seed(seed, {static_cast<std::uint64_t>(Stream::lifetimes), t}));
		}
	}

	SystemState initial_state()
	{
		Rng rng(seed_, Stream::initial_state);
		return draw_initial_state(region_, config_.initial, rng);
	}

	RunMetrics run(std::unique_ptr<AdmissionController> controller)
	{
		ctrl_ = std::move(controller);
		estimates_.assign(ctrl_->queue_count(), {});
		metrics_.queue_length_integral.assign(ctrl_->queue_count(), 0.0);
		update_max_assigned();

		for (std::size_t t = 0; t < scenario_.type_count(); ++t) {
			for (int i = 0; i < ctrl_->state()[t]; ++i)
				push({lifetime_rng_[t].exponential(scenario_.types[t].release_rate), EventKind::release, 0, t});
			schedule_arrival(t, 0.0);
		}

		while (!events_.empty() && events_.top().time <= config_.horizon) {
			const Event ev = events_.top();
			events_.pop();
			advance_to(ev.time);
			switch (ev.kind) {
			case EventKind::release:
				handle_release(ev);
				break;
			case EventKind::arrival:
				handle_arrival(ev);
				break;
			case EventKind::renege_deadline:
				handle_deadline(ev);
				break;
			}
		}
		advance_to(config_.horizon);

		for (const auto& [id, live] : live_) {
			auto& rec = metrics_.requests[id];
			rec.fate = RequestFate::waiting;
			rec.wait = config_.horizon - rec.arrival_time;
			++metrics_.counts[rec.slice_type].waiting;
		}
		return std::move(metrics_);
	}

private:
	void push(Event ev)
	{
		ev.seq = next_seq_++;
		events_.push(ev);
	}

	void schedule_arrival(std::size_t type, double now)
	{
		const double t = now + arrival_rng_[type].exponential(scenario_.types[type].arrival_rate);
		if (t <= config_.horizon)
			push({t, EventKind::arrival, 0, type});
	}

	void advance_to(double t)
	{
		const double dt = t - now_;
		if (dt > 0.0) {
			const double lo = std::max(now_, measure_from_);
			const double measured = std::max(0.0, t - lo);
			const auto& s = ctrl_->state();
			if (measured > 0.0) {
				metrics_.occupancy[region_.state_to_index(s)] += measured;
				double rate = 0.0;
				for (std::size_t n = 0; n < s.size(); ++n)
					rate += s[n] * scenario_.types[n].utility_rate;
				metrics_.utility_integral += rate * measured;
			}
			for (std::size_t q = 0; q < ctrl_->queue_count(); ++q) {
				const std::size_t len = ctrl_->queue(q).size();
				if (measured > 0.0)
					metrics_.queue_length_integral[q] += static_cast<double>(len) * measured;
				auto& est = estimates_[q];
				if (len > 0)
					est.busy_time += dt;
				if (est.time_at_length.size() <= len)
					est.time_at_length.resize(len + 1, 0.0);
				est.time_at_length[len] += dt;
			}
		}
		now_ = t;
	}

	void update_max_assigned()
	{
		const auto a = assigned_resources(scenario_, ctrl_->state());
		for (std::size_t m = 0; m < a.size(); ++m)
			metrics_.max_assigned[m] = std::max(metrics_.max_assigned[m], a[m]);
	}

	void trace(const char* kind, std::size_t type, std::uint64_t id)
	{
		if (!config_.trace)
			return;
		metrics_.trace.push_back({now_, kind, type, id, ctrl_->queue_lengths(), ctrl_->state().counts});
	}

	double expected_wait_for(const QueueEstimates& est, std::size_t position) const
	{
		const auto mu = est.serving_rate();
		if (config_.regime.kind == tenant::KnowledgeKind::full)
			return tenant::expected_wait(position, *mu, est.reneging_rates(position));
		return static_cast<double>(position) / *mu;
	}

	bool joins(const PendingRequest& req, std::size_t length_with_self) const
	{
		const auto& regime = config_.regime;
		if (!regime.balks())
			return true;
		const auto& est = estimates_[ctrl_->queue_of(req.slice_type())];
		const auto& terms = req.terms;
		double wait_estimate = 0.0;
		if (regime.kind == tenant::KnowledgeKind::avg_wait) {
			wait_estimate = est.average_wait();
		} else {
			if (!est.serving_rate())
				return true; // nothing published yet: optimistic
			wait_estimate = expected_wait_for(est, length_with_self);
		}
		return terms.lifetime_profit() - terms.issue_cost - terms.waiting_cost_rate * wait_estimate >= 0.0;
	}

	void handle_release(const Event& ev)
	{
		auto accepted = ctrl_->on_release(ev.slice_type);
		update_max_assigned();
		trace("release", ev.slice_type, 0);
		process_acceptances(accepted);
	}

	void handle_arrival(const Event& ev)
	{
		const std::size_t type = ev.slice_type;
		schedule_arrival(type, now_);
		const auto& spec = scenario_.types[type];

		PendingRequest req;
		req.id = metrics_.requests.size();
		req.terms = {type, spec.issue_cost, spec.waiting_cost_rate, spec.profit_rate,
		             lifetime_rng_[type].exponential(spec.release_rate)};
		req.regime = config_.regime;
		req.enter_time = now_;

		RequestRecord rec;
		rec.id = req.id;
		rec.slice_type = type;
		rec.arrival_time = now_;
		rec.lifetime = req.terms.lifetime;
		metrics_.requests.push_back(rec);
		++metrics_.counts[type].arrivals;
		trace("request", type, req.id);

		const auto id = req.id;
		const auto terms = req.terms;
		auto outcome = ctrl_->on_request(std::move(req), [this](const PendingRequest& r, std::size_t l) {
			return joins(r, l);
		});
		auto& record = metrics_.requests[id];
		switch (outcome.disposition) {
		case Disposition::balked:
			record.fate = RequestFate::balked;
			++metrics_.counts[type].balks;
			trace("balk", type, id);
			return;
		case Disposition::rejected_cap:
			record.fate = RequestFate::cap_rejected;
			++metrics_.counts[type].cap_rejections;
			trace("cap_reject", type, id);
			return;
		case Disposition::queued:
		case Disposition::accepted_immediately:
			break;
		}

		const std::size_t q = ctrl_->queue_of(type);
		live_[id] = Live{q, 0, 0};
		// entry length is set by the controller on enqueue
		if (outcome.disposition == Disposition::queued)
			metrics_.requests[id].entry_length = ctrl_->queue(q).back().entry_length;
		else
			metrics_.requests[id].entry_length = 1;
		update_max_assigned();
		process_acceptances(outcome.accepted);

		if (live_.count(id) == 0)
			return; // admitted on the spot
		if (config_.regime.kind == tenant::KnowledgeKind::blind) {
			const double t_max = tenant::renege_blind(terms, config_.regime.risk_factor);
			schedule_deadline(id, now_ + t_max);
		}
		reevaluate({q});
	}

	void schedule_deadline(std::uint64_t id, double at)
	{
		auto& live = live_.at(id);
		++live.version;
		if (at <= config_.horizon)
			push({std::max(at, now_), EventKind::renege_deadline, 0, 0, id, live.version});
	}

	void handle_deadline(const Event& ev)
	{
		auto it = live_.find(ev.request);
		if (it == live_.end() || it->second.version != ev.version)
			return;
		const std::size_t q = it->second.queue;
		renege(ev.request);
		reevaluate({q});
	}

	void renege(std::uint64_t id)
	{
		auto it = live_.find(id);
		const std::size_t q = it->second.queue;
		const auto position = ctrl_->position_of(q, id);
		ctrl_->remove(q, id);
		auto& est = estimates_[q];
		if (position) {
			if (est.reneges_at_position.size() <= *position)
				est.reneges_at_position.resize(*position + 1, 0);
			++est.reneges_at_position[*position];
		}
		auto& rec = metrics_.requests[id];
		rec.fate = RequestFate::reneged;
		rec.wait = now_ - rec.arrival_time;
		rec.end_profit = tenant::end_profit(terms_of(rec), tenant::Outcome::reneged, rec.wait);
		++metrics_.counts[rec.slice_type].reneges;
		live_.erase(it);
		trace("renege", rec.slice_type, id);
	}

	tenant::TenantRequest terms_of(const RequestRecord& rec) const
	{
		const auto& spec = scenario_.types[rec.slice_type];
		return {rec.slice_type, spec.issue_cost, spec.waiting_cost_rate, spec.profit_rate, rec.lifetime};
	}

	void process_acceptances(const std::vector<AcceptanceRecord>& accepted)
	{
		if (accepted.empty())
			return;
		std::vector<std::size_t> touched;
		for (const auto& a : accepted) {
			const auto id = a.request.id;
			auto& rec = metrics_.requests[id];
			const std::size_t type = rec.slice_type;
			rec.fate = RequestFate::accepted;
			rec.wait = now_ - rec.arrival_time;
			rec.end_profit = tenant::end_profit(terms_of(rec), tenant::Outcome::accepted, rec.wait);
			++metrics_.counts[type].acceptances;
			metrics_.acceptance_times[type].push_back(now_);
			push({now_ + rec.lifetime, EventKind::release, 0, type});

			const std::size_t q = ctrl_->queue_of(type);
			auto& est = estimates_[q];
			if (rec.wait > 0.0)
				++est.served_from_queue;
			est.accepted_wait_sum += rec.wait;
			++est.accepted;
			live_.erase(id);
			touched.push_back(q);
			trace("accept", type, id);
		}
		update_max_assigned();
		reevaluate(touched);
	}

	/// Re-decides every request whose position changed, until no further
	/// reneging happens.
	void reevaluate(std::vector<std::size_t> queues)
	{
		using tenant::KnowledgeKind;
		const auto kind = config_.regime.kind;
		if (kind != KnowledgeKind::position_only && kind != KnowledgeKind::serving_rate && kind != KnowledgeKind::full)
			return;
		std::sort(queues.begin(), queues.end());
		queues.erase(std::unique(queues.begin(), queues.end()), queues.end());
		for (std::size_t q : queues) {
			for (;;) {
				std::vector<std::uint64_t> leaving;
				const auto& queue = ctrl_->queue(q);
				for (std::size_t i = 0; i < queue.size(); ++i) {
					const auto& req = queue[i];
					auto& live = live_.at(req.id);
					const std::size_t k = i + 1;
					if (live.last_position == k)
						continue;
					live.last_position = k;
					live.position_since = now_;
					if (decide(req, k, live))
						leaving.push_back(req.id);
				}
				if (leaving.empty())
					break;
				for (auto id : leaving)
					renege(id);
			}
		}
	}

	/// True when the request reneges now; may schedule a deadline instead.
	bool decide(const PendingRequest& req, std::size_t k, Live& live)
	{
		using tenant::KnowledgeKind;
		const auto& est = estimates_[live.queue];
		switch (config_.regime.kind) {
		case KnowledgeKind::position_only: {
			const double elapsed = now_ - live.position_since;
			const auto verdict = tenant::renege_position(req.terms, k, req.entry_length, elapsed, config_.regime.delta_k);
			if (verdict.decision == tenant::RenegeDecision::renege)
				return true;
			if (verdict.deadline)
				schedule_deadline(req.id, live.position_since + *verdict.deadline);
			else
				++live.version; // cancel a pending deadline
			return false;
		}
		case KnowledgeKind::serving_rate: {
			const auto mu = est.serving_rate();
			return mu && tenant::renege_serving_rate(req.terms, k, *mu) == tenant::RenegeDecision::renege;
		}
		case KnowledgeKind::full: {
			const auto mu = est.serving_rate();
			return mu && tenant::renege_full(req.terms, k, *mu, est.reneging_rates(k)) == tenant::RenegeDecision::renege;
		}
		default:
			return false;
		}
	}

	const Scenario& scenario_;
	const RegionIndex& region_;
	const SimConfig& config_;
	std::uint64_t seed_;
	double measure_from_ = 0.0;
	double now_ = 0.0;
	std::uint64_t next_seq_ = 0;
	std::priority_queue<Event, std::vector<Event>, EventLater> events_;
	std::vector<Rng> arrival_rng_;
	std::vector<Rng> lifetime_rng_;
	std::unique_ptr<AdmissionController> ctrl_;
	std::vector<QueueEstimates> estimates_;
	std::unordered_map<std::uint64_t, Live> live_;
	RunMetrics metrics_;
};

} // namespace

RunMetrics run_replication(const Scenario& scenario, const RegionIndex& region, const Strategy& strategy,
                           const SimConfig& config, std::uint64_t seed)
{
	if (!strategy.scenario_fingerprint.empty() && strategy.scenario_fingerprint != scenario_fingerprint(scenario))
		throw InvalidInput("strategy was built for a different scenario (fingerprint mismatch)");
	validate_strategy(strategy, region);
	Simulator sim(scenario, region, config, seed);
	auto initial = sim.initial_state();
	return sim.run(std::make_unique<MultiQueueController>(region, strategy, std::move(initial), config.queue_cap));
}

RunMetrics greedy_single_queue_baseline(const Scenario& scenario, const RegionIndex& region, const SimConfig& config,
                                        std::uint64_t seed)
{
	Simulator sim(scenario, region, config, seed);
	auto initial = sim.initial_state();
	// One queue carries every type, so the per-queue cap scales with N.
	std::optional<std::size_t> cap;
	if (config.queue_cap)
		cap = *config.queue_cap * scenario.type_count();
	return sim.run(std::make_unique<SingleQueueController>(region, std::move(initial), cap));
}

MonteCarloResult aggregate(std::vector<RunMetrics> runs, std::size_t type_count)
{
	MonteCarloResult out;
	std::vector<double> utility, wait, admission;
	std::vector<std::vector<double>> total(type_count), mean(type_count), chance(type_count);
	for (const auto& r : runs) {
		utility.push_back(r.mean_utility_rate());
		wait.push_back(r.mean_joined_wait());
		admission.push_back(r.admission_rate());
		for (std::size_t n = 0; n < type_count; ++n) {
			const auto s = stats::profit_summary(r.end_profits(n));
			total[n].push_back(s.total);
			mean[n].push_back(s.mean);
			chance[n].push_back(s.chance);
		}
	}
	out.utility_rate = stats::mean_se(utility);
	out.joined_wait = stats::mean_se(wait);
	out.admission = stats::mean_se(admission);
	for (std::size_t n = 0; n < type_count; ++n) {
		out.total_profit.push_back(stats::mean_se(total[n]));
		out.mean_profit.push_back(stats::mean_se(mean[n]));
		out.profit_chance.push_back(stats::mean_se(chance[n]));
	}
	out.runs = std::move(runs);
	return out;
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body)
{
	if (n == 0)
		return;
	std::atomic<std::size_t> next{0};
	std::exception_ptr failure;
	std::mutex failure_mutex;
	auto worker = [&] {
		for (std::size_t i = next++; i < n; i = next++) {
			try {
				body(i);
			} catch (...) {
				std::lock_guard lock(failure_mutex);
				if (!failure)
					failure = std::current_exception();
				next = n;
			}
		}
	};
	const std::size_t count = std::clamp<std::size_t>(threads, 1, n);
	if (count == 1) {
		worker();
	} else {
		std::vector<std::thread> pool;
		for (std::size_t i = 0; i < count; ++i)
			pool.emplace_back(worker);
		for (auto& t : pool)
			t.join();
	}
	if (failure)
		std::rethrow_exception(failure);
}

MonteCarloResult run_monte_carlo(const Scenario& scenario, const RegionIndex& region, const Strategy* strategy,
                                 const SimConfig& config)
{
	config.validate();
	std::vector<RunMetrics> runs(config.replications);
	parallel_for(runs.size(), config.threads, [&](std::size_t r) {
		const auto seed = replication_seed(config.master_seed, r);
		runs[r] = strategy ? run_replication(scenario, region, *strategy, config, seed)
		                   : greedy_single_queue_baseline(scenario, region, config, seed);
	});
	return aggregate(std::move(runs), scenario.type_count());
}

double IsolatedQueueResult::mean_joined_wait() const
{
	double total = 0.0;
	for (double w : accepted_waits)
		total += w;
	for (double w : reneged_waits)
		total += w;
	const std::size_t n = accepted_waits.size() + reneged_waits.size();
	return n ? total / static_cast<double>(n) : 0.0;
}

IsolatedQueueResult isolated_queue_sim(const queueing::QueueParams& params, double horizon, std::uint64_t seed,
                                       std::size_t max_events)
{
	params.validate();
	if (!(horizon > 0.0))
		throw InvalidInput("isolated_queue_sim: horizon must be > 0");
	Rng rng(seed, Stream::service);
	const double lambda = params.arrival_rate;
	const double mu = params.service_rate;
	const double alpha = params.reneging_rate;
	const double delta = params.delta();

	IsolatedQueueResult out;
	std::vector<double> waiting; // enter times, FIFO order
	std::vector<double> time_at(1, 0.0);
	double now = 0.0;
	double length_integral = 0.0;
	while (out.events < max_events) {
		const std::size_t l = waiting.size();
		const double rate = lambda + (l > 0 ? mu : 0.0) + static_cast<double>(l) * alpha;
		const double dt = rng.exponential(rate);
		const double step = std::min(dt, horizon - now);
		time_at[l] += step;
		length_integral += static_cast<double>(l) * step;
		now += step;
		if (now >= horizon)
			break;
		++out.events;
		const double u = rng.uniform() * rate;
		if (u < lambda) {
			++out.arrivals;
			if (rng.uniform() < std::pow(delta, static_cast<double>(l + 1))) {
				++out.joined;
				waiting.push_back(now);
				if (time_at.size() <= waiting.size())
					time_at.resize(waiting.size() + 1, 0.0);
			} else {
				++out.balked;
			}
		} else if (l > 0 && u < lambda + mu) {
			++out.accepted;
			out.accepted_waits.push_back(now - waiting.front());
			waiting.erase(waiting.begin());
		} else {
			const auto victim = static_cast<std::size_t>(rng.index(l));
			++out.reneged;
			out.reneged_waits.push_back(now - waiting[victim]);
			waiting.erase(waiting.begin() + static_cast<std::ptrdiff_t>(victim));
		}
	}
	out.total_time = now;
	out.occupancy = time_at;
	if (now > 0.0) {
		for (double& v : out.occupancy)
			v /= now;
		out.mean_length = length_integral / now;
	}
	return out;
}

} // namespace slicing::sim
