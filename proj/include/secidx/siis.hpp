#pragma once

#include "secidx/aead.hpp"
#include "secidx/ontology.hpp"
#include "secidx/paillier.hpp"
#include "secidx/rng.hpp"
#include "secidx/text.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace secidx::siis {

// Searchable encryption over a secure inverted index. Scores live in the
// integer interval [0, inv_max]; a fixed pool of ciphertexts per score value
// (tables T1/T2) decouples the ciphertext volume from the corpus size, and
// the index stores ciphertext ids instead of ciphertexts. Index I1 maps
// concepts to documents, index I2 maps users to the documents they may
// access; both are padded with dummy postings that decrypt to zero.

using Alias = std::uint64_t; // index-side document id
using CtId = std::uint64_t;  // ciphertext id in T1/T2

// Owner-side table: score -> ids of the ciphertexts encrypting it.
struct OwnerScoreTable {
    int inv_max = 100;
    std::map<std::uint32_t, std::vector<CtId>> ids_by_score;

    std::size_t total_ids() const;
};

// Server-side table: ciphertext id -> ciphertext.
struct ServerScoreTable {
    std::unordered_map<CtId, he::Ciphertext> ct_by_id;
};

struct TabGenResult {
    OwnerScoreTable t1;
    ServerScoreTable t2;
};

// Number of zero ciphertexts: (NC * NS) / 2 * K / 10, integer arithmetic.
std::uint64_t nc_zero(std::uint64_t nc, int ns, int K);

// NC_0 ciphertexts of 0 plus NC of every other score in [0, inv_max].
TabGenResult tabgen(const he::PublicKey& pk, int inv_max, std::uint64_t nc, int K, Rng& rng);

// floor(DN * Random(1, 10K) / 100). K = 0 is the explicit no-dummies hook.
std::uint64_t dummy_count(std::uint64_t dn, int K, Rng& rng);

struct I1Posting {
    Alias alias;
    CtId primary_ct;
    CtId secondary_ct;
};

struct SecureIndexI1 {
    std::map<onto::ConceptId, std::vector<I1Posting>> entries;
};

struct I2Posting {
    Alias alias;
    CtId access_ct;
};

struct AccessIndexI2 {
    std::map<std::string, std::vector<I2Posting>> entries;
};

struct AliasTable {
    std::map<std::string, Alias> alias_of;
    std::map<Alias, std::string> id_of;
};

// Owner-side plaintext record of what was encrypted; input of the
// reference checks, never shipped to the server.
struct OracleSidecar {
    // alias -> concept -> (quantized primary, quantized secondary)
    std::map<Alias, std::map<onto::ConceptId, std::pair<std::uint32_t, std::uint32_t>>> doc_scores;
    // user -> alias -> access score (> 0); aliases absent here that appear
    // in the user's entry are dummies
    std::map<std::string, std::map<Alias, std::uint32_t>> access_scores;
    // concept -> aliases of real postings
    std::map<onto::ConceptId, std::set<Alias>> real_postings;
    double max_secondary = 0.0; // normalizer used for quantization
};

struct BuildResult {
    SecureIndexI1 i1;
    AccessIndexI2 i2;
    AliasTable aliases;
    OracleSidecar oracle;
};

struct BuildOptions {
    int K = 10;                  // dummy-volume security parameter, 0 disables dummies
    std::size_t concept_cap = 20; // top-X concepts per document
    int inv_max = 100;
};

BuildResult build_indexes(const text::Collection& collection, const text::Stoplist& stoplist,
                          const onto::Ontology& onto,
                          const std::map<std::string, std::set<std::string>>& users,
                          const OwnerScoreTable& t1, const BuildOptions& options, Rng& rng);

struct TrapdoorConcept {
    onto::ConceptId concept_id;
    std::uint32_t cp; // quantized primary weight (plaintext)
    std::uint32_t cs; // quantized secondary weight (plaintext)
};

// x concepts sampled without replacement from the query's top y.
struct Trapdoor {
    std::vector<TrapdoorConcept> concepts;
};

Trapdoor trapdoor(const std::vector<std::string>& query_terms, const text::Stoplist& stoplist,
                  const onto::Ontology& onto, std::size_t x, std::size_t y, int inv_max,
                  Rng& rng);

struct ResultTriple {
    Alias alias;
    he::Ciphertext x; // encrypted primary similarity
    he::Ciphertext y; // encrypted secondary similarity
    he::Ciphertext z; // encrypted access score
};

using SearchResult = std::vector<ResultTriple>;

// Selects the I1 entries of the trapdoor concepts and the I2 entry of the
// user, intersects, classifies candidates by how many selected entries
// contain them, keeps k from the highest categories, and aggregates
// scores homomorphically. inv_max is the public score bound; the modulus
// must exceed the worst-case aggregate sum(cp_j) * inv_max so decrypted
// sums are exact integers, never wrapped.
SearchResult search(const SecureIndexI1& i1, const AccessIndexI2& i2,
                    const ServerScoreTable& t2, const he::PublicKey& pk,
                    const Trapdoor& trapdoor, const std::string& user_id, std::size_t k,
                    int inv_max = 100);

struct RankedDoc {
    Alias alias;
    std::uint64_t x = 0;
    std::uint64_t y = 0;
    std::uint64_t z = 0;

    bool operator==(const RankedDoc&) const = default;
};

// Decrypts, drops zero similarity (dummies) and zero access scores
// (inaccessible), sorts by (x, y) descending with alias tie-break.
std::vector<RankedDoc> client_sort(const SearchResult& result, const he::SecretKey& sk,
                                   const he::PublicKey& pk);

// --- persistence ------------------------------------------------------------
// T2: JSON lines {"id": ..., "ct": decimal string}
void save_t2_jsonl(const ServerScoreTable& t2, const std::filesystem::path& file);
ServerScoreTable load_t2_jsonl(const std::filesystem::path& file);

// I1: JSON lines {"concept": ..., "postings": [[alias, p_id, s_id], ...]}
void save_i1_jsonl(const SecureIndexI1& i1, const std::filesystem::path& file);
SecureIndexI1 load_i1_jsonl(const std::filesystem::path& file);

// I2: JSON lines {"user": ..., "postings": [[alias, a_id], ...]}
void save_i2_jsonl(const AccessIndexI2& i2, const std::filesystem::path& file);
AccessIndexI2 load_i2_jsonl(const std::filesystem::path& file);

// T1 and the alias table are encrypted at rest.
void save_t1_sealed(const OwnerScoreTable& t1, const aead::Key& key,
                    const std::filesystem::path& file, Rng& rng);
OwnerScoreTable load_t1_sealed(const aead::Key& key, const std::filesystem::path& file);

void save_aliases_sealed(const AliasTable& aliases, const aead::Key& key,
                         const std::filesystem::path& file, Rng& rng);
AliasTable load_aliases_sealed(const aead::Key& key, const std::filesystem::path& file);

} // namespace secidx::siis
