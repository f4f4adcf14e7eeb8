#include "secidx/sknn.hpp"

#include "secidx/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace secidx::sknn {
namespace {

constexpr int kKeygenRetries = 16;
constexpr double kMinAbsDet = 1e-6;

Eigen::MatrixXd random_invertible(int dim, Rng& rng, Eigen::MatrixXd& inverse) {
    for (int attempt = 0; attempt < kKeygenRetries; ++attempt) {
        Eigen::MatrixXd m(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        if (!lu.isInvertible()) continue;
        double det = std::abs(lu.determinant());
        if (det < kMinAbsDet && std::isfinite(det)) continue;
        inverse = lu.inverse();
        return m;
    }
    throw ConfigError("could not sample an invertible matrix");
}

// Extended document vector: (d, 1, eps_1 .. eps_u)
Eigen::VectorXd extend_doc(const Key& key, const Eigen::VectorXd& d,
                           const Params& params, Rng& rng) {
    Eigen::VectorXd ext(key.dim());
    ext.head(key.m) = d;
    ext(key.m) = 1.0;
    for (int j = 0; j < key.u; ++j) ext(key.m + 1 + j) = rng.uniform(0.0, params.epsilon_max);
    return ext;
}

// Extended query vector: (r*q, t, alpha_1 .. alpha_u)
Eigen::VectorXd extend_query(const Key& key, const Eigen::VectorXd& q,
                             const Params& params, Rng& rng) {
    Eigen::VectorXd ext(key.dim());
    ext.head(key.m) = params.r * q;
    ext(key.m) = params.t;
    for (int j = 0; j < key.u; ++j)
        ext(key.m + 1 + j) = rng.bernoulli(params.alpha_density) ? 1.0 : 0.0;
    return ext;
}

// Positions where the split bit selects copying keep the value in both
// halves; the others get a random additive split.
void split(const Key& key, const Eigen::VectorXd& ext, bool copy_on_zero,
           Rng& rng, Eigen::VectorXd& first, Eigen::VectorXd& second) {
    first.resize(key.dim());
    second.resize(key.dim());
    for (int j = 0; j < key.dim(); ++j) {
        bool copy = (key.split[static_cast<std::size_t>(j)] == 0) == copy_on_zero;
        if (copy) {
            first(j) = ext(j);
            second(j) = ext(j);
        } else {
            double delta = rng.uniform(-1.0, 1.0);
            first(j) = ext(j) / 2.0 + delta;
            second(j) = ext(j) / 2.0 - delta;
        }
    }
}

} // namespace

Key keygen(int m, int u, Rng& rng) {
    if (m < 1) throw DomainError("sknn keygen: m must be >= 1");
    if (u < 0) throw DomainError("sknn keygen: u must be >= 0");
    Key key;
    key.m = m;
    key.u = u;
    key.split.resize(static_cast<std::size_t>(key.dim()));
    for (auto& bit : key.split) bit = rng.bernoulli(0.5) ? 1 : 0;
    key.m1 = random_invertible(key.dim(), rng, key.m1_inv);
    key.m2 = random_invertible(key.dim(), rng, key.m2_inv);
    return key;
}

EncryptedDoc enc_doc(const Key& key, const Eigen::VectorXd& d, const Params& params, Rng& rng) {
    if (d.size() != key.m) throw DomainError("sknn enc_doc: dimension mismatch");
    Eigen::VectorXd ext = extend_doc(key, d, params, rng);
    Eigen::VectorXd dp, dpp;
    split(key, ext, /*copy_on_zero=*/true, rng, dp, dpp);
    return EncryptedDoc{key.m1.transpose() * dp, key.m2.transpose() * dpp};
}

EncryptedQuery enc_query(const Key& key, const Eigen::VectorXd& q, const Params& params, Rng& rng) {
    if (q.size() != key.m) throw DomainError("sknn enc_query: dimension mismatch");
    if (params.r <= 0.0) throw DomainError("sknn enc_query: r must be positive");
    Eigen::VectorXd ext = extend_query(key, q, params, rng);
    Eigen::VectorXd qp, qpp;
    split(key, ext, /*copy_on_zero=*/false, rng, qp, qpp);
    return EncryptedQuery{key.m1_inv * qp, key.m2_inv * qpp};
}

double eval(const EncryptedDoc& doc, const EncryptedQuery& query) {
    if (doc.a.size() != query.a.size() || doc.b.size() != query.b.size())
        throw DomainError("sknn eval: dimension mismatch");
    return doc.a.dot(query.a) + doc.b.dot(query.b);
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
    auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j].get<double>();
    return m;
}

} // namespace

void save_key(const Key& key, const std::filesystem::path& file) {
    nlohmann::json j;
    j["m"] = key.m;
    j["u"] = key.u;
    j["split"] = key.split;
    j["m1"] = matrix_to_json(key.m1);
    j["m2"] = matrix_to_json(key.m2);
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw ConfigError("cannot write key: " + file.string());
    out << j.dump();
}

Key load_key(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read key: " + file.string());
    nlohmann::json j = nlohmann::json::parse(in);
    Key key;
    key.m = j.at("m").get<int>();
    key.u = j.at("u").get<int>();
    key.split = j.at("split").get<std::vector<std::uint8_t>>();
    key.m1 = matrix_from_json(j.at("m1"));
    key.m2 = matrix_from_json(j.at("m2"));
    key.m1_inv = key.m1.fullPivLu().inverse();
    key.m2_inv = key.m2.fullPivLu().inverse();
    return key;
}

} // namespace secidx::sknn
