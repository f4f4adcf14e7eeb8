#include "secidx/rng.hpp"

#include "secidx/error.hpp"

#include <cmath>

namespace secidx {

Rng::Rng(std::uint64_t seed) : gen_(seed) {
    gmp_randinit_mt(gmp_state_);
    reseed_gmp(gen_());
}

Rng::Rng(Rng&& other) noexcept : gen_(other.gen_) {
    gmp_randinit_set(gmp_state_, other.gmp_state_);
}

Rng& Rng::operator=(Rng&& other) noexcept {
    if (this != &other) {
        gen_ = other.gen_;
        gmp_randclear(gmp_state_);
        gmp_randinit_set(gmp_state_, other.gmp_state_);
    }
    return *this;
}

Rng::~Rng() {
    gmp_randclear(gmp_state_);
}

void Rng::reseed_gmp(std::uint64_t seed) {
    mpz_class s(static_cast<unsigned long>(seed >> 32));
    s <<= 32;
    s += static_cast<unsigned long>(seed & 0xffffffffULL);
    gmp_randseed(gmp_state_, s.get_mpz_t());
}

std::uint64_t Rng::next_u64() {
    return gen_();
}

std::uint64_t Rng::uniform_u64(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw DomainError("uniform_u64: lo > hi");
    std::uint64_t span = hi - lo;
    if (span == UINT64_MAX) return next_u64();
    // rejection sampling to avoid modulo bias
    std::uint64_t range = span + 1;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return lo + v % range;
}

double Rng::uniform(double lo, double hi) {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

bool Rng::bernoulli(double p) {
    return uniform() < p;
}

mpz_class Rng::mpz_below(const mpz_class& bound) {
    if (bound <= 0) throw DomainError("mpz_below: bound must be positive");
    mpz_class out;
    mpz_urandomm(out.get_mpz_t(), gmp_state_, bound.get_mpz_t());
    return out;
}

mpz_class Rng::mpz_bits(unsigned bits) {
    if (bits == 0) throw DomainError("mpz_bits: bits must be positive");
    mpz_class out;
    mpz_urandomb(out.get_mpz_t(), gmp_state_, bits);
    mpz_setbit(out.get_mpz_t(), bits - 1);
    return out;
}

Rng Rng::fork() {
    return Rng(next_u64());
}

} // namespace secidx
