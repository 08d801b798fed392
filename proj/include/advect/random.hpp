#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "advect/error.hpp"

namespace advect {

/// Seeded generator whose derived draws are defined here rather than by the standard
/// library's distributions, so sequences are identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw DomainError("empty range");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do r = engine_();
        while (r >= limit);
        return r % n;
    }

    /// Index drawn proportionally to non-negative weights (cumulative sums given).
    std::size_t pick_cumulative(std::span<const double> cumulative) {
        double u = uniform() * cumulative.back();
        std::size_t lo = 0, hi = cumulative.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (u < cumulative[mid]) hi = mid;
            else lo = mid + 1;
        }
        return lo;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

inline std::vector<double> cumulative(std::span<const double> weights) {
    std::vector<double> c(weights.size());
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0)) throw DomainError("negative weight");
        s += weights[i];
        c[i] = s;
    }
    if (!(s > 0.0)) throw DomainError("weights sum to zero");
    return c;
}

} // namespace advect
