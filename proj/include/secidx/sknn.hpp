#pragma once

#include "secidx/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace secidx::sknn {

// Vector encryption supporting inner-product evaluation between encrypted
// document vectors and encrypted query vectors. A vector of dimension m is
// extended by one fixed dimension and u dummy dimensions, split in two
// halves steered by the secret bit vector, then hidden behind a pair of
// invertible matrices.

struct Key {
    std::vector<std::uint8_t> split; // bit vector, length dim()
    Eigen::MatrixXd m1, m2;
    Eigen::MatrixXd m1_inv, m2_inv;
    int m = 0; // original dimension
    int u = 0; // dummy dimensions

    int dim() const { return m + u + 1; }
};

struct Params {
    double r = 1.0;             // query scale, > 0
    double t = 0.0;             // query offset
    double epsilon_max = 0.01;  // bound on document dummy values
    double alpha_density = 0.5; // P(alpha_j = 1)
};

struct EncryptedDoc {
    Eigen::VectorXd a; // M1^T * D'
    Eigen::VectorXd b; // M2^T * D''
};

struct EncryptedQuery {
    Eigen::VectorXd a; // M1^-1 * Q'
    Eigen::VectorXd b; // M2^-1 * Q''
};

Key keygen(int m, int u, Rng& rng);

EncryptedDoc enc_doc(const Key& key, const Eigen::VectorXd& d, const Params& params, Rng& rng);

EncryptedQuery enc_query(const Key& key, const Eigen::VectorXd& q, const Params& params, Rng& rng);

// a.a' + b.b' = r * (d.q) + sum(eps_j * alpha_j) + t
double eval(const EncryptedDoc& doc, const EncryptedQuery& query);

// JSON round trip; the inverses are recomputed on load.
void save_key(const Key& key, const std::filesystem::path& file);
Key load_key(const std::filesystem::path& file);

} // namespace secidx::sknn
