#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <utility>
#include <limits>
#include <vector>

namespace slicing {

/// SplitMix64 finalizer. Used both as the generator's output function and to
/// derive independent seeds from (master, index, purpose) tuples.
constexpr std::uint64_t mix64(std::uint64_t x)
{
	x += 0x9E3779B97F4A7C15ULL;
	x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
	x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
	return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path)
{
	std::uint64_t h = mix64(master);
	for (auto p : path)
		h = mix64(h ^ mix64(p + 0x632BE59BD9B4E019ULL));
	return h;
}

/// Purposes for per-replication sub-streams. Adding a consumer never shifts
/// the draws of another one.
enum class Stream : std::uint64_t {
	arrivals = 1,
	lifetimes = 2,
	impatience = 3,
	initial_state = 4,
	strategy = 5,
	service = 6,
};

/// Counter-based generator: output i is mix64(key + i * golden). Draws are
/// reproducible across platforms because the distributions below are written
/// out instead of relying on <random>'s implementation-defined ones.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : counter_(mix64(seed)) {}
	Rng(std::uint64_t seed, Stream stream) : Rng(derive_seed(seed, {static_cast<std::uint64_t>(stream)})) {}

	std::uint64_t next_u64()
	{
		counter_ += 0x9E3779B97F4A7C15ULL;
		std::uint64_t z = counter_;
		z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
		z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
		return z ^ (z >> 31);
	}

	/// Uniform in [0, 1) with 53 random bits.
	double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

	/// Exp(rate) by inversion; rate <= 0 yields +inf (the event never happens).
	double exponential(double rate)
	{
		if (!(rate > 0.0))
			return std::numeric_limits<double>::infinity();
		return -std::log1p(-uniform()) / rate;
	}

	bool bernoulli(double p) { return uniform() < p; }

	/// Unbiased integer in [0, n) by rejection.
	std::uint64_t index(std::uint64_t n)
	{
		if (n <= 1)
			return 0;
		const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
		std::uint64_t x;
		do {
			x = next_u64();
		} while (x >= limit);
		return x % n;
	}

	template <class T>
	void shuffle(std::vector<T>& v)
	{
		for (std::size_t i = v.size(); i > 1; --i)
			std::swap(v[i - 1], v[index(i)]);
	}

private:
	std::uint64_t counter_;
};

} // namespace slicing
