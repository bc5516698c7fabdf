#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace ssm {

/// Seedable 64-bit generator used for every random draw in the library.
///
/// The algorithm is xoshiro256** seeded through splitmix64. Uniform reals
/// and bounded integers are derived here rather than through <random>
/// distributions, whose output is implementation-defined, so that a given
/// seed reproduces the same stream on every platform and compiler.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept;

    std::uint64_t next() noexcept;

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept;

    /// Uniform integer in [0, bound). `bound` must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept;

    bool bernoulli(double p) noexcept { return uniform() < p; }

    template <typename T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_[4];
};

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Mixes a value into a running seed; used to derive per-cell and per-task seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) noexcept;
std::uint64_t mix_seed(std::uint64_t seed, std::string_view text) noexcept;

}  // namespace ssm
