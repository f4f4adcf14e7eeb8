#pragma once

#include "secidx/ontology.hpp"
#include "secidx/rng.hpp"
#include "secidx/sknn.hpp"
#include "secidx/text.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace secidx::sse {

// Vector-model searchable encryption: every document is represented by its
// top-X concepts, realized as two dense vectors over the concept space (one
// per score level) and encrypted independently. Search evaluates both inner
// products per row and ranks with the two-level comparison.

struct IndexRow {
    std::string doc_id;
    sknn::EncryptedDoc primary;
    sknn::EncryptedDoc secondary;
};

struct OracleRow {
    std::string doc_id;
    onto::ConceptVector concepts;
};

struct VectorModelIndex {
    std::uint32_t concept_dim = 0; // n, total concepts
    std::uint32_t dummy_dims = 0;  // u
    std::vector<IndexRow> rows;
    // Owner-only plaintext concept vectors; never written to the cloud file.
    std::vector<OracleRow> sidecar;
};

struct Trapdoor {
    sknn::EncryptedQuery primary;
    sknn::EncryptedQuery secondary;
};

struct ScoredDoc {
    std::string doc_id;
    double primary = 0.0;
    double secondary = 0.0;

    bool operator==(const ScoredDoc&) const = default;
};

VectorModelIndex build_index(const text::Collection& collection, const text::Stoplist& stoplist,
                             const onto::Ontology& onto, const sknn::Key& key,
                             std::size_t concept_cap, const sknn::Params& params, Rng& rng);

// Binary term vector -> concept vector -> two encrypted query vectors.
// Both channels share the same r and t so the two-level ordering survives
// the per-query blinding. Throws DomainError when no query term maps to a
// concept.
Trapdoor trapdoor(const std::vector<std::string>& query_terms, const text::Stoplist& stoplist,
                  const onto::Ontology& onto, const sknn::Key& key, std::size_t concept_cap,
                  const sknn::Params& params, Rng& rng);

std::vector<ScoredDoc> search(const VectorModelIndex& index, const Trapdoor& trapdoor,
                              std::size_t k);

// Evaluated channel scores are doubles carrying ~1e-12 transform noise, so
// ordering works on quantized keys: equal keys mean "tied at this level".
std::int64_t score_key(double score);

// Total order: quantized (primary, secondary) descending, doc_id ascending.
bool ranks_before(const ScoredDoc& a, const ScoredDoc& b);

enum class FileFormat { binary, json };

// Cloud index file: header {n, u, row_count} + packed rows. Both a packed
// little-endian binary and a JSON form exist; the header tag tells them
// apart. The sidecar is not written.
void save_index(const VectorModelIndex& index, const std::filesystem::path& file,
                FileFormat format = FileFormat::binary);
VectorModelIndex load_index(const std::filesystem::path& file);

void save_trapdoor(const Trapdoor& trapdoor, const std::filesystem::path& file,
                   FileFormat format = FileFormat::binary);
Trapdoor load_trapdoor(const std::filesystem::path& file);

} // namespace secidx::sse
