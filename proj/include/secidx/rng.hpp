#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace secidx {

// Seedable randomness source shared by every module. One instance per
// workflow keeps builds and searches reproducible under a fixed seed.
// Doubles are derived from raw 64-bit draws rather than std distributions
// so that sequences do not depend on the standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    Rng(const Rng&) = delete;
    Rng& operator=(const Rng&) = delete;
    Rng(Rng&&) noexcept;
    Rng& operator=(Rng&&) noexcept;
    ~Rng();

    std::uint64_t next_u64();

    // Uniform integer in [lo, hi], inclusive.
    std::uint64_t uniform_u64(std::uint64_t lo, std::uint64_t hi);

    // Uniform double in [lo, hi).
    double uniform(double lo = 0.0, double hi = 1.0);

    bool bernoulli(double p);

    // Uniform mpz in [0, bound).
    mpz_class mpz_below(const mpz_class& bound);

    // Uniform mpz with exactly `bits` bits (top bit set).
    mpz_class mpz_bits(unsigned bits);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_u64(0, i - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Sample `count` distinct elements from `pool` without replacement.
    template <typename T>
    std::vector<T> sample(std::vector<T> pool, std::size_t count) {
        if (count > pool.size()) count = pool.size();
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t j = i + static_cast<std::size_t>(
                                    uniform_u64(0, pool.size() - 1 - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(count);
        return pool;
    }

    // Independent child generator; lets sub-phases draw without
    // perturbing the parent sequence.
    Rng fork();

private:
    std::mt19937_64 gen_;
    gmp_randstate_t gmp_state_;
    void reseed_gmp(std::uint64_t seed);
};

} // namespace secidx
