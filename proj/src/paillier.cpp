#include "secidx/paillier.hpp"

#include "secidx/error.hpp"

#include <json.hpp>

namespace secidx::he {
namespace {

using nlohmann::json;

constexpr int kPrimeRetries = 256;

// L(x) = (x - 1) / n, defined on x == 1 (mod n).
mpz_class big_l(const mpz_class& x, const mpz_class& n) {
    return (x - 1) / n;
}

mpz_class powmod(const mpz_class& base, const mpz_class& exp, const mpz_class& mod) {
    mpz_class out;
    mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
    return out;
}

mpz_class invmod(const mpz_class& a, const mpz_class& mod) {
    mpz_class out;
    if (mpz_invert(out.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()) == 0) {
        throw DomainError("no modular inverse exists");
    }
    return out;
}

mpz_class random_prime(unsigned bits, Rng& rng) {
    for (int attempt = 0; attempt < kPrimeRetries; ++attempt) {
        mpz_class candidate = rng.mpz_bits(bits);
        mpz_setbit(candidate.get_mpz_t(), 0);
        mpz_class p;
        mpz_nextprime(p.get_mpz_t(), candidate.get_mpz_t());
        if (mpz_sizeinbase(p.get_mpz_t(), 2) == bits) return p;
    }
    throw ConfigError("prime generation failed after bounded retries");
}

void check_under_pk(const PublicKey& pk, const Ciphertext& c) {
    if (c.value <= 0 || c.value >= pk.n2) {
        throw KeyMismatchError("ciphertext is not in Z*_{n^2} of this key");
    }
}

} // namespace

PublicKey PublicKey::make(mpz_class n_value) {
    PublicKey pk;
    pk.n = std::move(n_value);
    pk.g = pk.n + 1;
    pk.n2 = pk.n * pk.n;
    return pk;
}

KeyPair keypair_from_primes(const mpz_class& p, const mpz_class& q) {
    if (p == q) throw ConfigError("keygen requires distinct primes");
    KeyPair kp;
    kp.pk = PublicKey::make(p * q);
    mpz_class pm1 = p - 1;
    mpz_class qm1 = q - 1;
    mpz_lcm(kp.sk.lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
    mpz_class u = big_l(powmod(kp.pk.g, kp.sk.lambda, kp.pk.n2), kp.pk.n) % kp.pk.n;
    kp.sk.mu = invmod(u, kp.pk.n);
    return kp;
}

KeyPair keygen(unsigned prime_bits, Rng& rng) {
    if (prime_bits < 8) throw ConfigError("prime_bits must be >= 8");
    mpz_class p = random_prime(prime_bits, rng);
    mpz_class q;
    for (int attempt = 0;; ++attempt) {
        q = random_prime(prime_bits, rng);
        if (q != p) break;
        if (attempt >= kPrimeRetries) {
            throw ConfigError("could not find distinct primes");
        }
    }
    return keypair_from_primes(p, q);
}

Ciphertext enc_with_r(const PublicKey& pk, const mpz_class& m, const mpz_class& r) {
    if (m < 0 || m >= pk.n) throw DomainError("message outside [0, n)");
    mpz_class gcd;
    mpz_gcd(gcd.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
    if (r <= 0 || r >= pk.n || gcd != 1) {
        throw DomainError("randomness r must lie in Z*_n");
    }
    mpz_class c = powmod(pk.g, m, pk.n2) * powmod(r, pk.n, pk.n2) % pk.n2;
    return Ciphertext{std::move(c)};
}

Ciphertext enc(const PublicKey& pk, const mpz_class& m, Rng& rng) {
    mpz_class r;
    mpz_class gcd;
    do {
        r = rng.mpz_below(pk.n - 1) + 1;
        mpz_gcd(gcd.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
    } while (gcd != 1);
    return enc_with_r(pk, m, r);
}

mpz_class dec(const SecretKey& sk, const PublicKey& pk, const Ciphertext& c) {
    check_under_pk(pk, c);
    mpz_class gcd;
    mpz_gcd(gcd.get_mpz_t(), c.value.get_mpz_t(), pk.n.get_mpz_t());
    if (gcd != 1) throw DomainError("invalid ciphertext: gcd(c, n) != 1");
    mpz_class l = big_l(powmod(c.value, sk.lambda, pk.n2), pk.n) % pk.n;
    return l * sk.mu % pk.n;
}

Ciphertext add(const PublicKey& pk, const Ciphertext& c1, const Ciphertext& c2) {
    check_under_pk(pk, c1);
    check_under_pk(pk, c2);
    return Ciphertext{c1.value * c2.value % pk.n2};
}

Ciphertext mul_plain(const PublicKey& pk, const Ciphertext& c, const mpz_class& k) {
    check_under_pk(pk, c);
    if (k < 0 || k >= pk.n) throw DomainError("plaintext factor outside [0, n)");
    return Ciphertext{powmod(c.value, k, pk.n2)};
}

std::string to_json(const PublicKey& pk) {
    return json{{"n", pk.n.get_str()}, {"g", pk.g.get_str()}}.dump();
}

std::string to_json(const SecretKey& sk) {
    return json{{"lambda", sk.lambda.get_str()}, {"mu", sk.mu.get_str()}}.dump();
}

PublicKey public_key_from_json(const std::string& text) {
    json j = json::parse(text);
    PublicKey pk = PublicKey::make(mpz_class(j.at("n").get<std::string>()));
    mpz_class g(j.at("g").get<std::string>());
    if (g != pk.g) throw ConfigError("unsupported generator, expected g = n + 1");
    return pk;
}

SecretKey secret_key_from_json(const std::string& text) {
    json j = json::parse(text);
    return SecretKey{mpz_class(j.at("lambda").get<std::string>()),
                     mpz_class(j.at("mu").get<std::string>())};
}

std::string ct_to_string(const Ciphertext& c) {
    return c.value.get_str();
}

Ciphertext ct_from_string(const std::string& text) {
    return Ciphertext{mpz_class(text)};
}

} // namespace secidx::he
