#pragma once

#include "secidx/rng.hpp"

#include <gmpxx.h>

#include <string>

namespace secidx::he {

// Additively homomorphic encryption of integer scores. Keys and
// ciphertexts are immutable values; all operations are pure.

struct PublicKey {
    mpz_class n;  // product of two primes
    mpz_class g;  // generator, fixed to n + 1
    mpz_class n2; // cached n^2

    static PublicKey make(mpz_class n_value);
};

struct SecretKey {
    mpz_class lambda; // lcm(p-1, q-1)
    mpz_class mu;     // (L(g^lambda mod n^2))^-1 mod n
};

struct Ciphertext {
    mpz_class value; // element of Z*_{n^2}

    bool operator==(const Ciphertext&) const = default;
};

struct KeyPair {
    PublicKey pk;
    SecretKey sk;
};

// Generates two distinct primes of exactly `prime_bits` bits each.
KeyPair keygen(unsigned prime_bits, Rng& rng);

// Deterministic key construction from given primes (test fixtures).
KeyPair keypair_from_primes(const mpz_class& p, const mpz_class& q);

Ciphertext enc(const PublicKey& pk, const mpz_class& m, Rng& rng);

// Encryption with caller-chosen randomness r in Z*_n (known-answer tests).
Ciphertext enc_with_r(const PublicKey& pk, const mpz_class& m, const mpz_class& r);

mpz_class dec(const SecretKey& sk, const PublicKey& pk, const Ciphertext& c);

// dec(add(c1, c2)) == (m1 + m2) mod n
Ciphertext add(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2);

// dec(mul_plain(c, k)) == (k * m) mod n
Ciphertext mul_plain(const PublicKey& pk, const Ciphertext& c, const mpz_class& k);

// JSON round trips: {"n": ..., "g": ...} / {"lambda": ..., "mu": ...},
// all big integers as decimal strings.
std::string to_json(const PublicKey& pk);
std::string to_json(const SecretKey& sk);
PublicKey public_key_from_json(const std::string& text);
SecretKey secret_key_from_json(const std::string& text);

std::string ct_to_string(const Ciphertext& c);
Ciphertext ct_from_string(const std::string& text);

} // namespace secidx::he
