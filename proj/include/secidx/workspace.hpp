#pragma once

#include "secidx/aead.hpp"
#include "secidx/aph.hpp"
#include "secidx/oracle.hpp"
#include "secidx/paillier.hpp"
#include "secidx/parsearch.hpp"
#include "secidx/siis.hpp"
#include "secidx/sse.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace secidx::cli {

// Three-party simulation: owner, cloud and user are directories, and the
// parties exchange nothing but files placed in each other's roots. The
// cloud directory must never hold secret material; leak_check walks it
// against a whitelist.

struct Config {
    int Inv_max = 100;
    std::uint64_t NC = 20;
    int K = 10;
    std::size_t X = 20;
    std::size_t x_concepts = 10;
    std::size_t y_concepts = 15;
    std::uint32_t V = 3;
    std::size_t block_size = 4096;
    std::uint32_t scramble_x = 0;
    std::uint32_t scramble_y = 2;
    std::size_t workers = 2;
    std::size_t partitions = 2;
    std::string strategy = "shared";
    std::uint64_t seed = 42;

    unsigned prime_bits = 64;
    int sknn_u = 3;
    double epsilon_max = 0.0;
    double alpha_density = 0.5;
    std::size_t min_page_terms = 100;
    std::size_t max_concepts_per_term = 5000;

    std::string stopwords_file;
    std::string corpus_dir;      // recorded at build time
    std::string onto_corpus_dir; // recorded at build time
    std::string users_file;      // recorded at build time
};

void save_config(const Config& config, const std::filesystem::path& file);
Config load_config(const std::filesystem::path& file);

struct Workspace {
    std::filesystem::path root;
    Config config;

    std::filesystem::path owner_dir() const { return root / "owner"; }
    std::filesystem::path cloud_dir() const { return root / "cloud"; }
    std::filesystem::path user_dir() const { return root / "user"; }
    std::filesystem::path config_file() const { return root / "config.cfg"; }
};

enum class Scheme { sse, siis };
Scheme scheme_from_string(const std::string& name);

Workspace init(const std::filesystem::path& root, const Config& config, bool force);
Workspace open(const std::filesystem::path& root);

// HE key pair and the symmetric at-rest key. Secret material lands in
// owner/ and user/, the HE public key also in cloud/. The vector-scheme
// key is generated at build time because its dimension is the ontology's
// concept count.
void keygen(Workspace& ws);

void build(Workspace& ws, Scheme scheme, const std::filesystem::path& corpus_dir,
           const std::filesystem::path& onto_corpus_dir,
           const std::optional<std::filesystem::path>& users_file);

struct SearchHit {
    std::string doc_id;
    double primary = 0.0;
    double secondary = 0.0;
};

struct SearchOutput {
    std::vector<SearchHit> hits;
    std::vector<SearchHit> oracle_hits; // filled when with_oracle
};

SearchOutput search(Workspace& ws, Scheme scheme, const std::string& user_id, std::size_t k,
                    const std::vector<std::string>& query_terms, bool with_oracle = false);

// Fetches documents through the block protocol and writes the decrypted
// bytes to user/fetched/<doc_id>.txt. Returns the written files.
std::vector<std::filesystem::path> fetch(Workspace& ws, const std::vector<std::string>& doc_ids);

struct BenchRow {
    std::string strategy;
    std::size_t workers = 0;
    std::size_t partitions = 0;
    std::size_t docs = 0;
    std::size_t queries = 0;
    double wall_ms = 0.0;
};

std::string bench_csv_header();
std::string to_csv(const BenchRow& row);

// Synthetic batched-search benchmark; results are identical across
// configurations, only the wall time varies.
BenchRow bench(std::size_t docs, std::size_t queries, std::size_t workers,
               par::Strategy strategy, std::size_t partitions, std::size_t k,
               std::uint64_t seed);

struct EvalRow {
    std::string query_id;
    double accuracy = 0.0;
    double recall = 0.0;
};

// queries: TSV "query_id \t query text"; qrels: TSV "query_id \t doc_id".
std::vector<EvalRow> eval(Workspace& ws, Scheme scheme, const std::string& user_id,
                          std::size_t k, const std::filesystem::path& queries_file,
                          const std::filesystem::path& qrels_file);

// Empty result means the cloud directory holds only whitelisted artifacts.
std::vector<std::string> leak_check(const Workspace& ws);

std::map<std::string, std::set<std::string>> load_users_file(const std::filesystem::path& file);

} // namespace secidx::cli
