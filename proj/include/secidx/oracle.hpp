#pragma once

#include "secidx/ontology.hpp"
#include "secidx/text.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace secidx::oracle {

// Plaintext reference search used by tests and acceptance checks. These
// implementations deliberately share no code with the encrypted search
// paths; they only reuse the plaintext indexing front end.

struct RankedDoc {
    std::string doc_id;
    double primary = 0.0;
    double secondary = 0.0;

    bool operator==(const RankedDoc&) const = default;
};

// Ordered by (primary, secondary) descending, doc_id ascending.
using Ranking = std::vector<RankedDoc>;

struct WeightedConcept {
    onto::ConceptId concept_id;
    double primary;
    double secondary;
};

struct Options {
    std::size_t concept_cap = 20; // top-X concepts per document and query
    // Quantize document scores into [0, inv_max] before scoring
    // (primary clamped, secondary max-normalized over the collection).
    std::optional<int> quantize_inv_max;
    // Use these query concept weights instead of processing query_terms.
    std::optional<std::vector<WeightedConcept>> query_concepts;
    // Restrict the ranking to these doc ids.
    std::optional<std::set<std::string>> accessible;
    // Drop documents whose primary total is zero.
    bool drop_zero_primary = false;
};

// k = 0 returns the full ranking.
Ranking concept_search(const text::Collection& collection, const text::Stoplist& stoplist,
                       const onto::Ontology& onto, const std::vector<std::string>& query_terms,
                       std::size_t k, const Options& options = {});

// Full sort then truncate; brute-force counterpart of the rank function.
std::vector<std::pair<std::string, double>> rank_all(
    std::vector<std::pair<std::string, double>> scores, std::size_t k);

// Concatenate then rank; brute-force counterpart of top-k merging.
std::vector<std::pair<std::string, double>> merge(
    const std::vector<std::vector<std::pair<std::string, double>>>& lists, std::size_t k);

} // namespace secidx::oracle
