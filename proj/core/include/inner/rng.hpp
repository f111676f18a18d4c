#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace inner {

// Deterministic pseudo-random stream (xoshiro256++). All randomness in the
// library flows through this type so that a fixed seed reproduces identical
// results regardless of platform library internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform draw in [0, 1) with 53 bits of mantissa.
    double uniform();
    // Uniform draw in [lo, hi).
    double uniform(double lo, double hi);
    // Standard normal via Box-Muller; the paired draw is cached.
    double normal();
    // Unbiased integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);
    bool bernoulli(double p);

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_[4];
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

// Derives an independent stream seed from a base seed and a component tag,
// so adding one component's draws never perturbs another's.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream);
std::uint64_t derive_seed(std::uint64_t base, std::string_view stream, std::uint64_t index);

}  // namespace inner
