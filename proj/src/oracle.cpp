#include "secidx/oracle.hpp"

#include "secidx/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace secidx::oracle {
namespace {

using onto::ConceptId;

std::vector<WeightedConcept> query_concepts_from_terms(
    const std::vector<std::string>& query_terms, const text::Stoplist& stoplist,
    const onto::Ontology& onto, std::size_t cap) {
    text::TermVector binary;
    for (const auto& raw : query_terms)
        for (const auto& term : text::process(raw, stoplist)) binary[term] = 1.0;
    std::vector<WeightedConcept> out;
    for (const auto& cw : onto::concept_weights(binary, onto, cap)) {
        out.push_back(WeightedConcept{cw.concept_id, static_cast<double>(cw.score.primary),
                                      cw.score.secondary});
    }
    return out;
}

} // namespace

Ranking concept_search(const text::Collection& collection, const text::Stoplist& stoplist,
                       const onto::Ontology& onto, const std::vector<std::string>& query_terms,
                       std::size_t k, const Options& options) {
    std::vector<WeightedConcept> query =
        options.query_concepts
            ? *options.query_concepts
            : query_concepts_from_terms(query_terms, stoplist, onto, options.concept_cap);

    // per-document concept maps
    std::map<std::string, std::map<ConceptId, std::pair<double, double>>> docs;
    double max_secondary = 0.0;
    for (const auto& [doc_id, vec] : text::tfidf(collection, stoplist)) {
        auto& entry = docs[doc_id];
        for (const auto& cw : onto::concept_weights(vec, onto, options.concept_cap)) {
            entry[cw.concept_id] = {static_cast<double>(cw.score.primary), cw.score.secondary};
            max_secondary = std::max(max_secondary, cw.score.secondary);
        }
    }

    if (options.quantize_inv_max) {
        double inv_max = static_cast<double>(*options.quantize_inv_max);
        for (auto& [_, entry] : docs) {
            for (auto& [_, score] : entry) {
                score.first = std::min(score.first, inv_max);
                score.second = max_secondary > 0.0
                                   ? std::round(inv_max * score.second / max_secondary)
                                   : 0.0;
            }
        }
    }

    Ranking ranking;
    for (const auto& [doc_id, entry] : docs) {
        if (options.accessible && !options.accessible->contains(doc_id)) continue;
        RankedDoc rd{doc_id, 0.0, 0.0};
        for (const auto& qc : query) {
            auto it = entry.find(qc.concept_id);
            if (it == entry.end()) continue;
            rd.primary += qc.primary * it->second.first;
            rd.secondary += qc.secondary * it->second.second;
        }
        if (options.drop_zero_primary && rd.primary == 0.0) continue;
        ranking.push_back(std::move(rd));
    }

    std::sort(ranking.begin(), ranking.end(), [](const RankedDoc& a, const RankedDoc& b) {
        if (a.primary != b.primary) return a.primary > b.primary;
        if (a.secondary != b.secondary) return a.secondary > b.secondary;
        return a.doc_id < b.doc_id;
    });
    if (k > 0 && ranking.size() > k) ranking.resize(k);
    return ranking;
}

std::vector<std::pair<std::string, double>> rank_all(
    std::vector<std::pair<std::string, double>> scores, std::size_t k) {
    std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scores.size() > k) scores.resize(k);
    return scores;
}

std::vector<std::pair<std::string, double>> merge(
    const std::vector<std::vector<std::pair<std::string, double>>>& lists, std::size_t k) {
    std::vector<std::pair<std::string, double>> all;
    for (const auto& list : lists) all.insert(all.end(), list.begin(), list.end());
    return rank_all(std::move(all), k);
}

} // namespace secidx::oracle
