#include <doctest.h>

#include <deque>

#include "slicing/controller.hpp"
#include "slicing/error.hpp"
#include "support/oracles.hpp"

using namespace slicing;

namespace {

PendingRequest request(std::uint64_t id, std::size_t type)
{
	PendingRequest r;
	r.id = id;
	r.terms.slice_type = type;
	return r;
}

std::vector<std::size_t> types_of(const std::vector<AcceptanceRecord>& acc)
{
	std::vector<std::size_t> out;
	for (const auto& a : acc)
		out.push_back(a.request.slice_type());
	return out;
}

Scenario custom(std::vector<double> resources, std::vector<std::vector<double>> costs)
{
	Scenario s;
	s.resources.values = std::move(resources);
	for (auto& c : costs) {
		SliceTypeSpec t;
		t.cost.values = std::move(c);
		t.arrival_rate = 1.0;
		t.release_rate = 1.0;
		t.profit_rate = 1.0;
		s.types.push_back(t);
	}
	return s;
}

} // namespace

TEST_CASE("case study: multi-queue admits type 2 around a blocked type 1")
{
	const auto region = enumerate_regions(case_study_scenario());
	const auto strategy = naive_strategy(region, PreferenceVector({1, 2, 0}));
	MultiQueueController ctrl(region, strategy, SystemState({1, 0}));
	ctrl.enqueue(request(1, 0));
	ctrl.enqueue(request(2, 0));
	ctrl.enqueue(request(3, 1));
	ctrl.enqueue(request(4, 1));
	const auto acc = ctrl.serve_queues();
	CHECK(types_of(acc) == std::vector<std::size_t>{1, 1});
	CHECK(ctrl.state() == SystemState({1, 2}));
	CHECK(ctrl.queue(0).size() == 2);
}

TEST_CASE("case study: single queue blocks behind an infeasible head")
{
	const auto region = enumerate_regions(case_study_scenario());
	SingleQueueController ctrl(region, SystemState({1, 0}));
	ctrl.enqueue(request(1, 0));
	ctrl.enqueue(request(2, 0));
	ctrl.enqueue(request(3, 1));
	ctrl.enqueue(request(4, 1));
	CHECK(ctrl.serve_queue().empty());
	CHECK(ctrl.state() == SystemState({1, 0}));
	// Releasing the type-1 slice lets the head in, then the next type-1 blocks.
	const auto acc = ctrl.on_release(0);
	CHECK(types_of(acc) == std::vector<std::size_t>{0});
	CHECK(ctrl.queue(0).size() == 3);
}

TEST_CASE("single-type greedy: single queue and multi-queue accept identically")
{
	const auto sc = custom({1.0}, {{0.3}});
	const auto region = enumerate_regions(sc);
	const auto strategy = naive_strategy(region, PreferenceVector({1, 0}));
	MultiQueueController multi(region, strategy, SystemState({0}));
	SingleQueueController single(region, SystemState({0}));
	Rng rng(4);
	std::uint64_t id = 0;
	for (int step = 0; step < 500; ++step) {
		if (rng.bernoulli(0.6) || multi.state()[0] == 0) {
			const auto a = multi.on_request(request(id, 0), nullptr);
			const auto b = single.on_request(request(id, 0), nullptr);
			CHECK(a.disposition == b.disposition);
			CHECK(types_of(a.accepted) == types_of(b.accepted));
			++id;
		} else {
			CHECK(types_of(multi.on_release(0)) == types_of(single.on_release(0)));
		}
		CHECK(multi.state() == single.state());
	}
}

TEST_CASE("release examples")
{
	const auto region = enumerate_regions(case_study_scenario());
	const auto prefer2 = naive_strategy(region, PreferenceVector({2, 1, 0}));
	MultiQueueController ctrl(region, prefer2, SystemState({1, 0}));
	CHECK(ctrl.on_release(0).empty());
	CHECK(ctrl.state() == SystemState({0, 0}));
	CHECK_THROWS_AS(ctrl.on_release(0), ProtocolViolation);

	MultiQueueController sat(region, prefer2, SystemState({1, 2}));
	sat.enqueue(request(7, 1));
	const auto acc = sat.on_release(0);
	CHECK(types_of(acc) == std::vector<std::size_t>{1});
	CHECK(sat.state() == SystemState({0, 3}));
}

TEST_CASE("preferred queue infeasible, other queue fits")
{
	const auto region = enumerate_regions(case_study_scenario());
	const auto prefer1 = naive_strategy(region, PreferenceVector({1, 2, 0}));
	MultiQueueController ctrl(region, prefer1, SystemState({0, 3}));
	ctrl.enqueue(request(1, 0));
	ctrl.enqueue(request(2, 1));
	const auto acc = ctrl.serve_queues();
	CHECK(types_of(acc) == std::vector<std::size_t>{1});
	CHECK(ctrl.queue(0).size() == 1);
}

TEST_CASE("reserve-first column admits nothing")
{
	const auto region = enumerate_regions(case_study_scenario());
	const auto none = naive_strategy(region, PreferenceVector({0, 1, 2}));
	MultiQueueController ctrl(region, none, SystemState({0, 0}));
	const auto out = ctrl.on_request(request(1, 1), nullptr);
	CHECK(out.disposition == Disposition::queued);
	CHECK(out.accepted.empty());
	CHECK(ctrl.serve_queues().empty());
}

TEST_CASE("on_request dispositions")
{
	const auto region = enumerate_regions(case_study_scenario());
	const auto prefer1 = naive_strategy(region, PreferenceVector({1, 2, 0}));
	MultiQueueController ctrl(region, prefer1, SystemState({1, 2}), 2);
	CHECK(ctrl.on_request(request(1, 0), nullptr).disposition == Disposition::queued);
	CHECK(ctrl.on_request(request(2, 0), nullptr).disposition == Disposition::queued);
	CHECK(ctrl.on_request(request(3, 0), nullptr).disposition == Disposition::rejected_cap);
	auto balk_all = [](const PendingRequest&, std::size_t) { return false; };
	CHECK(ctrl.on_request(request(4, 1), balk_all).disposition == Disposition::balked);
	CHECK(ctrl.position_of(0, 2) == std::optional<std::size_t>(2));
	CHECK(ctrl.remove(0, 1));
	CHECK_FALSE(ctrl.remove(0, 1));
	CHECK(ctrl.position_of(0, 2) == std::optional<std::size_t>(1));

	MultiQueueController idle(region, prefer1, SystemState({0, 0}));
	const auto out = idle.on_request(request(9, 1), nullptr);
	CHECK(out.disposition == Disposition::accepted_immediately);
	REQUIRE(out.accepted.size() == 1);
	CHECK(out.accepted[0].request.id == 9);
}

TEST_CASE("brute-force equivalence of serve_queues with the reference walk")
{
	// Small regions (|S| <= 50), queues up to 4 deep, every initial state.
	const std::vector<Scenario> scenarios{
		case_study_scenario(),
		custom({1.0}, {{0.5}, {0.3}, {0.2}}),
		custom({1.0, 1.0}, {{0.4, 0.1}, {0.1, 0.4}}),
		custom({1.0}, {{0.25}, {0.35}}),
	};
	std::size_t cases = 0;
	for (const auto& sc : scenarios) {
		const auto region = enumerate_regions(sc);
		REQUIRE(region.size() <= 50);
		const std::size_t n = sc.type_count();
		std::vector<Strategy> strategies;
		for (int first = 1; first <= static_cast<int>(n); ++first) {
			std::vector<int> order{first};
			for (int t = 1; t <= static_cast<int>(n); ++t)
				if (t != first)
					order.push_back(t);
			order.push_back(0);
			strategies.push_back(naive_strategy(region, PreferenceVector(order)));
		}
		Rng rng(17);
		for (int i = 0; i < 40; ++i)
			strategies.push_back(random_strategy(region, rng, i % 2 == 0));

		std::size_t combos = 1;
		for (std::size_t t = 0; t < n; ++t)
			combos *= 5;
		for (const auto& strategy : strategies)
			for (const auto& start : region.feasible())
				for (std::size_t code = 0; code < combos; ++code) {
					std::vector<std::deque<int>> ref_queues(n);
					MultiQueueController ctrl(region, strategy, start);
					std::size_t c = code;
					int id = 0;
					for (std::size_t t = 0; t < n; ++t, c /= 5)
						for (std::size_t k = 0; k < c % 5; ++k, ++id) {
							ref_queues[t].push_back(id);
							ctrl.enqueue(request(static_cast<std::uint64_t>(id), t));
						}
					SystemState ref_state = start;
					std::vector<int> ref_ids;
					const auto ref = oracle::reference_serve(region, strategy, ref_state, ref_queues, &ref_ids);
					const auto acc = ctrl.serve_queues();
					REQUIRE(types_of(acc) == ref);
					for (std::size_t i = 0; i < acc.size(); ++i)
						REQUIRE(acc[i].request.id == static_cast<std::uint64_t>(ref_ids[i]));
					REQUIRE(ctrl.state() == ref_state);
					REQUIRE(is_feasible(sc, ctrl.state()));
					// Quiescence: no head acceptable under the final column.
					if (region.is_admissible(ctrl.state())) {
						for (int entry : strategy.column(region.state_to_index(ctrl.state())).order) {
							if (entry == 0)
								break;
							const auto t = static_cast<std::size_t>(entry - 1);
							REQUIRE((ctrl.queue(t).empty() || !region.contains(ctrl.state().incremented(t))));
						}
					}
					++cases;
				}
	}
	MESSAGE("checked " << cases << " (strategy, state, queue) combinations");
	CHECK(cases > 10000);
}
