#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace truetop {

// std distributions are implementation-defined, so the bounded draws below are
// hand-rolled on top of mt19937_64 to keep streams identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t uniform_index(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01();

    bool bernoulli(double p) { return uniform01() < p; }

    /// Geometric on {1, 2, ...} with the given mean (>= 1).
    std::uint64_t geometric(double mean);

    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of the named sub-stream `name` (optionally indexed) of a root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view name, std::uint64_t index = 0);

} // namespace truetop
