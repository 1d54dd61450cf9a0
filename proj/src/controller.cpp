#include "slicing/controller.hpp"

#include <algorithm>

#include "slicing/error.hpp"

namespace slicing {

const char* to_string(Disposition d)
{
	switch (d) {
	case Disposition::queued:
		return "queued";
	case Disposition::balked:
		return "balked";
	case Disposition::accepted_immediately:
		return "accepted_immediately";
	case Disposition::rejected_cap:
		return "rejected_cap";
	}
	return "?";
}

std::optional<std::size_t> AdmissionController::position_of(std::size_t q, std::uint64_t request_id) const
{
	const auto& queue_ref = queue(q);
	for (std::size_t i = 0; i < queue_ref.size(); ++i)
		if (queue_ref[i].id == request_id)
			return i + 1;
	return std::nullopt;
}

std::vector<std::size_t> AdmissionController::queue_lengths() const
{
	std::vector<std::size_t> out(queue_count());
	for (std::size_t q = 0; q < out.size(); ++q)
		out[q] = queue(q).size();
	return out;
}

namespace {

bool erase_by_id(std::deque<PendingRequest>& queue, std::uint64_t id)
{
	auto it = std::find_if(queue.begin(), queue.end(), [id](const PendingRequest& r) { return r.id == id; });
	if (it == queue.end())
		return false;
	queue.erase(it);
	return true;
}

RequestOutcome finish_request(std::uint64_t id, std::vector<AcceptanceRecord> accepted)
{
	RequestOutcome out;
	out.disposition = Disposition::queued;
	for (const auto& a : accepted)
		if (a.request.id == id)
			out.disposition = Disposition::accepted_immediately;
	out.accepted = std::move(accepted);
	return out;
}

} // namespace

MultiQueueController::MultiQueueController(const RegionIndex& region, const Strategy& strategy, SystemState initial,
                                           std::optional<std::size_t> queue_cap)
	: region_(&region), strategy_(&strategy), state_(std::move(initial)), queues_(region.type_count()), cap_(queue_cap)
{
	validate_strategy(strategy, region);
	if (!region.contains(state_))
		throw InvalidInput("initial controller state is outside the feasibility region");
}

std::vector<AcceptanceRecord> MultiQueueController::on_release(std::size_t slice_type)
{
	if (slice_type >= state_.size() || state_[slice_type] < 1)
		throw ProtocolViolation("release of slice type " + std::to_string(slice_type + 1) + " with no active slice");
	--state_[slice_type];
	return serve_queues();
}

RequestOutcome MultiQueueController::on_request(PendingRequest req, const JoinRule& joins)
{
	const std::size_t type = req.slice_type();
	if (type >= queues_.size())
		throw InvalidInput("request for unknown slice type " + std::to_string(type + 1));
	auto& queue = queues_[type];
	if (joins && !joins(req, queue.size() + 1))
		return {Disposition::balked, {}};
	if (cap_ && queue.size() >= *cap_)
		return {Disposition::rejected_cap, {}};
	req.entry_length = queue.size() + 1;
	const auto id = req.id;
	queue.push_back(std::move(req));
	return finish_request(id, serve_queues());
}

bool MultiQueueController::remove(std::size_t q, std::uint64_t request_id)
{
	return erase_by_id(queues_.at(q), request_id);
}

std::vector<AcceptanceRecord> MultiQueueController::serve_queues()
{
	std::vector<AcceptanceRecord> accepted;
	while (auto j = region_->find(state_)) {
		if (*j >= region_->admissible_count())
			break; // s outside A: nothing can be admitted
		const SystemState before = state_;
		// Column is fixed for the pass; feasibility is checked on the live state.
		const PreferenceVector& column = strategy_->column(*j);
		for (int entry : column.order) {
			if (entry == 0)
				break;
			const auto type = static_cast<std::size_t>(entry - 1);
			auto& queue = queues_[type];
			if (queue.empty() || !region_->contains(state_.incremented(type)))
				continue;
			accepted.push_back({std::move(queue.front())});
			queue.pop_front();
			++state_[type];
		}
		if (state_ == before)
			break;
	}
	return accepted;
}

SingleQueueController::SingleQueueController(const RegionIndex& region, SystemState initial,
                                             std::optional<std::size_t> queue_cap)
	: region_(&region), state_(std::move(initial)), cap_(queue_cap)
{
	if (!region.contains(state_))
		throw InvalidInput("initial controller state is outside the feasibility region");
}

std::vector<AcceptanceRecord> SingleQueueController::on_release(std::size_t slice_type)
{
	if (slice_type >= state_.size() || state_[slice_type] < 1)
		throw ProtocolViolation("release of slice type " + std::to_string(slice_type + 1) + " with no active slice");
	--state_[slice_type];
	return serve_queue();
}

RequestOutcome SingleQueueController::on_request(PendingRequest req, const JoinRule& joins)
{
	if (req.slice_type() >= state_.size())
		throw InvalidInput("request for unknown slice type " + std::to_string(req.slice_type() + 1));
	if (joins && !joins(req, queue_.size() + 1))
		return {Disposition::balked, {}};
	if (cap_ && queue_.size() >= *cap_)
		return {Disposition::rejected_cap, {}};
	req.entry_length = queue_.size() + 1;
	const auto id = req.id;
	queue_.push_back(std::move(req));
	return finish_request(id, serve_queue());
}

bool SingleQueueController::remove(std::size_t, std::uint64_t request_id) { return erase_by_id(queue_, request_id); }

std::vector<AcceptanceRecord> SingleQueueController::serve_queue()
{
	std::vector<AcceptanceRecord> accepted;
	while (!queue_.empty()) {
		const auto type = queue_.front().slice_type();
		if (!region_->contains(state_.incremented(type)))
			break; // head-of-line blocking
		accepted.push_back({std::move(queue_.front())});
		queue_.pop_front();
		++state_[type];
	}
	return accepted;
}

} // namespace slicing
