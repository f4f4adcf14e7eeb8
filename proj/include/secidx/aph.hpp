#pragma once

#include "secidx/aead.hpp"
#include "secidx/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace secidx::aph {

// Access-pattern hiding for document fetch: documents are split into
// fixed-size blocks, every block is encrypted into V distinct versions,
// versions are partitioned into groups, and each fetch requests one version
// per true block plus dummy versions drawn from the same groups.

struct DocInput {
    std::string data_id;          // collection-side identity
    std::uint64_t doc_alias;      // index-side identity
    std::vector<std::uint8_t> bytes;
};

// Client-side map breaking the link between collection and index ids.
struct CorrespondenceTable {
    std::map<std::string, std::uint64_t> alias_of_data_id;
};

struct BlockRef {
    std::uint64_t block_id;
    std::uint32_t rank; // 1-based position when merging back
};

struct BlockTables {
    std::map<std::uint64_t, std::vector<BlockRef>> tb;         // doc_alias -> blocks
    std::map<std::uint64_t, std::vector<std::uint64_t>> tv;    // block_id -> versions
    std::map<std::uint64_t, std::vector<std::uint64_t>> groups;// group_id -> versions
    std::map<std::uint64_t, std::uint64_t> group_of;           // version -> group
    std::uint32_t versions_per_block = 0;                      // V
    std::uint32_t group_size = 0;                              // Sz
};

// Server-side blobs, all of identical padded size.
struct BlockStore {
    std::map<std::uint64_t, std::vector<std::uint8_t>> blobs; // version_id -> bytes
};

struct PrepareOptions {
    std::size_t block_size = 4096; // S, >= 16
    std::uint32_t versions = 3;    // V, >= 1
    std::uint32_t scramble_y = 2;  // y of the dummy interval ]x, y]
};

struct PrepareResult {
    BlockStore store;
    BlockTables tables;
    CorrespondenceTable correspondence;
};

PrepareResult prepare(const std::vector<DocInput>& docs, const PrepareOptions& options,
                      const aead::Key& key, Rng& rng);

// V^beta(d): the number of distinct true-version combinations.
std::uint64_t theta1(const BlockTables& tables, std::uint64_t doc_alias);

struct FetchPlan {
    std::uint64_t doc_alias = 0;
    std::vector<std::uint64_t> true_versions;  // rank order
    std::vector<std::uint64_t> dummy_versions; // lambda per true block's group

    // The wire request: unordered set of version ids, kept sorted.
    std::vector<std::uint64_t> request() const;
};

// lambda uniform in [x+1, y]; N_db = lambda * beta dummies, lambda from the
// group of each chosen true version. x = y = 0 disables scrambling.
FetchPlan build_fetch(std::uint64_t doc_alias, const BlockTables& tables, std::uint32_t x,
                      std::uint32_t y, Rng& rng);

std::map<std::uint64_t, std::vector<std::uint8_t>> serve_fetch(
    const BlockStore& store, const std::vector<std::uint64_t>& request);

// Decrypts the true versions in rank order and concatenates the payloads.
std::vector<std::uint8_t> reconstruct(const FetchPlan& plan,
                                      const std::map<std::uint64_t, std::vector<std::uint8_t>>& blobs,
                                      const aead::Key& key);

struct LinkFlag {
    std::size_t first;  // 1-based fetch numbers
    std::size_t second;
    std::vector<std::uint64_t> versions; // the repeated request set
};

// Exact-repetition matcher: flags every pair of identical request sets in
// the trace. Used only to test the hiding properties.
std::vector<LinkFlag> adversary_link(const std::vector<std::vector<std::uint64_t>>& trace);

// --- persistence ------------------------------------------------------------
// Store: directory of <version_id>.blk files.
void save_store(const BlockStore& store, const std::filesystem::path& dir);
BlockStore load_store(const std::filesystem::path& dir);

// Reads only the requested blobs from a store directory (the server's side
// of the simulated fetch protocol).
std::map<std::uint64_t, std::vector<std::uint8_t>> load_blobs(
    const std::filesystem::path& dir, const std::vector<std::uint64_t>& request);

// Client tables are encrypted at rest.
void save_tables_sealed(const BlockTables& tables, const CorrespondenceTable& correspondence,
                        const aead::Key& key, const std::filesystem::path& file, Rng& rng);
void load_tables_sealed(const aead::Key& key, const std::filesystem::path& file,
                        BlockTables& tables, CorrespondenceTable& correspondence);

} // namespace secidx::aph
