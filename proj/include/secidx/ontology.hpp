#pragma once

#include "secidx/text.hpp"

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace secidx::onto {

using ConceptId = std::uint32_t;

struct ConceptScore {
    ConceptId concept_id;
    double score; // association degree between the term and the concept

    bool operator==(const ConceptScore&) const = default;
};

// Concept knowledge base built from a corpus of concept pages: term ->
// weighted concepts, plus the id -> title sidecar kept owner side.
struct Ontology {
    std::map<std::string, std::vector<ConceptScore>> postings;
    std::vector<std::string> concept_titles; // index = ConceptId

    std::size_t concept_count() const { return concept_titles.size(); }
};

struct BuildOptions {
    std::size_t min_page_terms = 100;
    std::size_t max_concepts_per_term = 5000;
};

// One text page per concept; pages shorter than min_page_terms tokens are
// skipped. Per-page TF-IDF vectors are transposed into term -> concept
// postings sorted by score descending and capped.
Ontology build_onto(const text::Collection& pages, const text::Stoplist& stoplist,
                    const BuildOptions& options = {});

// Two-level relevance: primary = number of distinct matched terms,
// secondary = accumulated TF-IDF association.
struct DoubleScore {
    std::uint32_t primary = 0;
    double secondary = 0.0;

    bool operator==(const DoubleScore&) const = default;
};

// (p1, s1) outranks (p2, s2) iff p1 > p2, or p1 == p2 and s1 > s2.
bool double_score_greater(const DoubleScore& a, const DoubleScore& b);

// Three-way form of the same ordering: negative when a ranks below b.
std::strong_ordering double_score_compare(const DoubleScore& a, const DoubleScore& b);

struct ConceptWeight {
    ConceptId concept_id;
    DoubleScore score;

    bool operator==(const ConceptWeight&) const = default;
};

// Ordered by double_score_compare, concept_id ascending on full ties.
using ConceptVector = std::vector<ConceptWeight>;

// Maps a weighted term vector onto its top-X concepts.
ConceptVector concept_weights(const text::TermVector& term_vec, const Ontology& onto,
                              std::size_t cap);

// JSON lines {"term": ..., "concepts": [[concept_id, score], ...]} plus a
// sidecar {"titles": [...]} head line.
void save_jsonl(const Ontology& onto, const std::filesystem::path& file);
Ontology load_jsonl(const std::filesystem::path& file);

} // namespace secidx::onto
