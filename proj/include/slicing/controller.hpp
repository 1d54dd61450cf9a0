#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "slicing/core.hpp"
#include "slicing/tenant.hpp"

namespace slicing {

/// A tenant request waiting for admission.
struct PendingRequest {
	std::uint64_t id = 0;
	tenant::TenantRequest terms;     // slice type, u0, u, zeta, realized lifetime
	tenant::KnowledgeRegime regime;
	double enter_time = 0.0;
	std::size_t entry_length = 0;    // queue length at join, including itself

	std::size_t slice_type() const { return terms.slice_type; }
};

struct AcceptanceRecord {
	PendingRequest request;
};

enum class Disposition { queued, balked, accepted_immediately, rejected_cap };

const char* to_string(Disposition d);

struct RequestOutcome {
	Disposition disposition = Disposition::queued;
	std::vector<AcceptanceRecord> accepted; // everything admitted during this event
};

/// Balking hook: given the queue length the request would see including
/// itself, returns true when the tenant issues (joins).
using JoinRule = std::function<bool(const PendingRequest&, std::size_t length_with_self)>;

/// Common surface of the queueing disciplines the simulator can drive.
class AdmissionController {
public:
	virtual ~AdmissionController() = default;

	virtual const SystemState& state() const = 0;
	virtual std::size_t queue_count() const = 0;
	/// Queue that requests of this slice type join.
	virtual std::size_t queue_of(std::size_t slice_type) const = 0;
	virtual const std::deque<PendingRequest>& queue(std::size_t q) const = 0;

	/// Releases one slice of the type and serves the queues. Throws ProtocolViolation when s_n = 0.
	virtual std::vector<AcceptanceRecord> on_release(std::size_t slice_type) = 0;
	/// Handles an arriving request, consulting the balking rule before enqueueing.
	virtual RequestOutcome on_request(PendingRequest req, const JoinRule& joins) = 0;
	/// Removes a waiting request (reneging). Returns false if it is not queued.
	virtual bool remove(std::size_t q, std::uint64_t request_id) = 0;
	/// 1-based position of a waiting request in its queue.
	std::optional<std::size_t> position_of(std::size_t q, std::uint64_t request_id) const;

	std::vector<std::size_t> queue_lengths() const;
};

/// Heterogeneous multi-queue FCFS controller: one queue per slice type,
/// served in the order given by the preference column of the current state.
class MultiQueueController final : public AdmissionController {
public:
	MultiQueueController(const RegionIndex& region, const Strategy& strategy, SystemState initial,
	                     std::optional<std::size_t> queue_cap = std::nullopt);

	const SystemState& state() const override { return state_; }
	std::size_t queue_count() const override { return queues_.size(); }
	std::size_t queue_of(std::size_t slice_type) const override { return slice_type; }
	const std::deque<PendingRequest>& queue(std::size_t q) const override { return queues_.at(q); }

	std::vector<AcceptanceRecord> on_release(std::size_t slice_type) override;
	RequestOutcome on_request(PendingRequest req, const JoinRule& joins) override;
	bool remove(std::size_t q, std::uint64_t request_id) override;

	/// Recursively serves the queues until blocked; returns the acceptances.
	std::vector<AcceptanceRecord> serve_queues();

	/// Direct queue access for tests and for seeding a controller state.
	void enqueue(PendingRequest req) { queues_.at(req.slice_type()).push_back(std::move(req)); }

private:
	const RegionIndex* region_;
	const Strategy* strategy_;
	SystemState state_;
	std::vector<std::deque<PendingRequest>> queues_;
	std::optional<std::size_t> cap_;
};

/// Greedy single-queue controller: one FIFO for all types; the head is
/// admitted whenever it fits, otherwise it blocks everything behind it.
class SingleQueueController final : public AdmissionController {
public:
	SingleQueueController(const RegionIndex& region, SystemState initial,
	                      std::optional<std::size_t> queue_cap = std::nullopt);

	const SystemState& state() const override { return state_; }
	std::size_t queue_count() const override { return 1; }
	std::size_t queue_of(std::size_t) const override { return 0; }
	const std::deque<PendingRequest>& queue(std::size_t) const override { return queue_; }

	std::vector<AcceptanceRecord> on_release(std::size_t slice_type) override;
	RequestOutcome on_request(PendingRequest req, const JoinRule& joins) override;
	bool remove(std::size_t q, std::uint64_t request_id) override;

	std::vector<AcceptanceRecord> serve_queue();
	void enqueue(PendingRequest req) { queue_.push_back(std::move(req)); }

private:
	const RegionIndex* region_;
	SystemState state_;
	std::deque<PendingRequest> queue_;
	std::optional<std::size_t> cap_;
};

} // namespace slicing
