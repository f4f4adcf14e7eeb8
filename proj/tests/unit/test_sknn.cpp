#include "secidx/error.hpp"
#include "secidx/sknn.hpp"

#include "unit/fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace secidx;

namespace {

Eigen::VectorXd random_vec(Rng& rng, int n, double lo = -1.0, double hi = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
    return v;
}

} // namespace

TEST_CASE("key dimensions and invertibility") {
    Rng rng(1);
    auto key = sknn::keygen(2, 1, rng);
    CHECK(key.dim() == 4);
    CHECK(key.split.size() == 4);
    CHECK(((key.m1 * key.m1_inv) - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(((key.m2 * key.m2_inv) - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-9);

    SUBCASE("seeded keygen is deterministic") {
        Rng a(5), b(5);
        auto ka = sknn::keygen(3, 2, a);
        auto kb = sknn::keygen(3, 2, b);
        CHECK(ka.split == kb.split);
        CHECK(ka.m1 == kb.m1);
        CHECK(ka.m2 == kb.m2);
    }
    SUBCASE("bad dimensions are rejected") {
        CHECK_THROWS_AS(sknn::keygen(0, 1, rng), DomainError);
        CHECK_THROWS_AS(sknn::keygen(2, -1, rng), DomainError);
    }
}

TEST_CASE("noise-free evaluation matches the plaintext inner product") {
    Rng rng(2);
    auto key = sknn::keygen(2, 1, rng);
    sknn::Params params;
    params.r = 1.0;
    params.t = 0.0;
    params.epsilon_max = 0.0;
    params.alpha_density = 0.0;

    Eigen::VectorXd d(2), q(2);
    d << 1, 2;
    q << 3, 4;
    auto enc_d = sknn::enc_doc(key, d, params, rng);
    auto enc_q = sknn::enc_query(key, q, params, rng);
    CHECK(sknn::eval(enc_d, enc_q) == doctest::Approx(11.0).epsilon(1e-9));

    SUBCASE("zero query evaluates to the offset") {
        params.t = 0.75;
        auto enc_zero = sknn::enc_query(key, Eigen::VectorXd::Zero(2), params, rng);
        CHECK(sknn::eval(enc_d, enc_zero) == doctest::Approx(0.75).epsilon(1e-9));
    }
}

TEST_CASE("algebraic identity on random instances") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        int m = 1 + static_cast<int>(rng.uniform_u64(0, 49));
        int u = static_cast<int>(rng.uniform_u64(0, 5));
        auto key = sknn::keygen(m, u, rng);
        sknn::Params params;
        params.r = rng.uniform(0.1, 3.0);
        params.t = rng.uniform(-2.0, 2.0);
        params.epsilon_max = rng.uniform(0.0, 0.05);
        params.alpha_density = 0.5;

        auto d = random_vec(rng, m);
        auto q = random_vec(rng, m);

        // twin generators observe the same epsilon/alpha draws the
        // encryption path consumes first
        Rng doc_a(77 + static_cast<std::uint64_t>(trial));
        Rng doc_b(77 + static_cast<std::uint64_t>(trial));
        auto enc_d = sknn::enc_doc(key, d, params, doc_a);
        Eigen::VectorXd eps(u);
        for (int j = 0; j < u; ++j) eps(j) = doc_b.uniform(0.0, params.epsilon_max);

        Rng qry_a(900 + static_cast<std::uint64_t>(trial));
        Rng qry_b(900 + static_cast<std::uint64_t>(trial));
        auto enc_q = sknn::enc_query(key, q, params, qry_a);
        Eigen::VectorXd alpha(u);
        for (int j = 0; j < u; ++j) alpha(j) = qry_b.bernoulli(params.alpha_density) ? 1.0 : 0.0;

        double expected = params.r * d.dot(q) + eps.dot(alpha) + params.t;
        double got = sknn::eval(enc_d, enc_q);
        CHECK(std::abs(got - expected) <= 1e-6 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("noise-free mode preserves the plaintext ranking exactly") {
    Rng rng(4);
    const int m = 8;
    auto key = sknn::keygen(m, 3, rng);
    sknn::Params params;
    params.r = 1.7;
    params.t = 0.3;
    params.epsilon_max = 0.0;

    std::vector<Eigen::VectorXd> docs;
    std::vector<sknn::EncryptedDoc> enc_docs;
    for (int i = 0; i < 100; ++i) {
        docs.push_back(random_vec(rng, m, 0.0, 1.0));
        enc_docs.push_back(sknn::enc_doc(key, docs.back(), params, rng));
    }
    auto q = random_vec(rng, m, 0.0, 1.0);
    auto enc_q = sknn::enc_query(key, q, params, rng);

    std::vector<std::size_t> plain_order(docs.size()), enc_order(docs.size());
    std::iota(plain_order.begin(), plain_order.end(), 0);
    std::iota(enc_order.begin(), enc_order.end(), 0);
    std::vector<double> plain(docs.size()), enc(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        plain[i] = docs[i].dot(q);
        enc[i] = sknn::eval(enc_docs[i], enc_q);
    }
    auto by = [](const std::vector<double>& scores) {
        return [&scores](std::size_t a, std::size_t b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return a < b;
        };
    };
    std::sort(plain_order.begin(), plain_order.end(), by(plain));
    std::sort(enc_order.begin(), enc_order.end(), by(enc));
    CHECK(plain_order == enc_order);
}

TEST_CASE("noisy mode keeps the order when the margin beats the noise budget") {
    // whenever r * (d1.q - d2.q) > u * epsilon_max, the noisy evaluations
    // must rank d1 above d2
    Rng rng(44);
    const int m = 6, u = 4;
    for (int trial = 0; trial < 30; ++trial) {
        auto key = sknn::keygen(m, u, rng);
        sknn::Params params;
        params.r = rng.uniform(0.5, 2.0);
        params.t = rng.uniform(-1.0, 1.0);
        params.epsilon_max = rng.uniform(0.001, 0.05);
        params.alpha_density = 1.0; // worst case: every dummy dimension active

        auto q = random_vec(rng, m, 0.0, 1.0);
        auto enc_q = sknn::enc_query(key, q, params, rng);
        std::vector<Eigen::VectorXd> docs;
        std::vector<sknn::EncryptedDoc> enc_docs;
        for (int i = 0; i < 20; ++i) {
            docs.push_back(random_vec(rng, m, 0.0, 1.0));
            enc_docs.push_back(sknn::enc_doc(key, docs.back(), params, rng));
        }
        double budget = static_cast<double>(u) * params.epsilon_max;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            for (std::size_t j = 0; j < docs.size(); ++j) {
                if (params.r * (docs[i].dot(q) - docs[j].dot(q)) > budget) {
                    CHECK(sknn::eval(enc_docs[i], enc_q) > sknn::eval(enc_docs[j], enc_q));
                }
            }
        }
    }
}

TEST_CASE("splitting conservation") {
    Rng rng(5);
    auto key = sknn::keygen(3, 2, rng);
    sknn::Params params;
    params.epsilon_max = 0.0;
    params.alpha_density = 0.0;
    params.r = 1.0;
    params.t = 0.0;

    Eigen::VectorXd d(3);
    d << 0.5, -1.0, 2.0;
    auto enc_d = sknn::enc_doc(key, d, params, rng);
    auto enc_q = sknn::enc_query(key, d, params, rng);

    // undo the matrix layer, then check per-position behavior
    Eigen::VectorXd dp = key.m1.transpose().fullPivLu().solve(enc_d.a);
    Eigen::VectorXd dpp = key.m2.transpose().fullPivLu().solve(enc_d.b);
    Eigen::VectorXd qp = key.m1 * enc_q.a;
    Eigen::VectorXd qpp = key.m2 * enc_q.b;

    Eigen::VectorXd doc_ext(key.dim()), query_ext(key.dim());
    doc_ext << d, 1.0, 0.0, 0.0;           // (d, 1, eps...)
    query_ext << d, params.t, 0.0, 0.0;    // (r*q, t, alpha...) with r=1
    for (int j = 0; j < key.dim(); ++j) {
        if (key.split[j] == 0) {
            CHECK(dp(j) == doctest::Approx(doc_ext(j)).epsilon(1e-6));
            CHECK(dpp(j) == doctest::Approx(doc_ext(j)).epsilon(1e-6));
            CHECK(qp(j) + qpp(j) == doctest::Approx(query_ext(j)).scale(1.0).epsilon(1e-6));
        } else {
            CHECK(qp(j) == doctest::Approx(query_ext(j)).scale(1.0).epsilon(1e-6));
            CHECK(qpp(j) == doctest::Approx(query_ext(j)).scale(1.0).epsilon(1e-6));
            CHECK(dp(j) + dpp(j) == doctest::Approx(doc_ext(j)).scale(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("dimension mismatches are rejected") {
    Rng rng(6);
    auto key = sknn::keygen(2, 1, rng);
    CHECK_THROWS_AS(sknn::enc_doc(key, Eigen::VectorXd::Zero(3), {}, rng), DomainError);
    CHECK_THROWS_AS(sknn::enc_query(key, Eigen::VectorXd::Zero(5), {}, rng), DomainError);

    auto other = sknn::keygen(4, 1, rng);
    auto d = sknn::enc_doc(key, Eigen::VectorXd::Zero(2), {}, rng);
    auto q = sknn::enc_query(other, Eigen::VectorXd::Zero(4), {}, rng);
    CHECK_THROWS_AS(sknn::eval(d, q), DomainError);
}

TEST_CASE("key file round trip") {
    fixtures::TempDir dir("sknn");
    Rng rng(7);
    auto key = sknn::keygen(5, 2, rng);
    auto file = dir.path() / "key.json";
    sknn::save_key(key, file);
    auto loaded = sknn::load_key(file);
    CHECK(loaded.split == key.split);
    CHECK(loaded.m1 == key.m1);
    CHECK((loaded.m1_inv - key.m1_inv).cwiseAbs().maxCoeff() < 1e-9);

    sknn::Params params;
    params.epsilon_max = 0.0;
    Eigen::VectorXd d(5);
    d << 1, 2, 3, 4, 5;
    auto enc_d = sknn::enc_doc(key, d, params, rng);
    auto enc_q = sknn::enc_query(loaded, d, params, rng);
    CHECK(sknn::eval(enc_d, enc_q) == doctest::Approx(params.r * d.dot(d) + params.t).epsilon(1e-9));
}
