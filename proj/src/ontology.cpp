#include "secidx/ontology.hpp"

#include "secidx/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <unordered_map>

namespace secidx::onto {

using nlohmann::json;

Ontology build_onto(const text::Collection& pages, const text::Stoplist& stoplist,
                    const BuildOptions& options) {
    if (pages.empty()) throw DomainError("build_onto: empty concept corpus");

    text::Collection kept;
    for (const auto& page : pages) {
        if (text::tokenize(page.body).size() < options.min_page_terms) continue;
        kept.push_back(page);
    }
    if (kept.empty()) throw DomainError("build_onto: every page is below min_page_terms");

    Ontology onto;
    onto.concept_titles.reserve(kept.size());

    auto vectors = text::tfidf(kept, stoplist);
    for (const auto& page : kept) {
        ConceptId id = static_cast<ConceptId>(onto.concept_titles.size());
        onto.concept_titles.push_back(page.id);
        for (const auto& [term, weight] : vectors.at(page.id)) {
            onto.postings[term].push_back(ConceptScore{id, weight});
        }
    }

    for (auto& [_, scores] : onto.postings) {
        std::sort(scores.begin(), scores.end(),
                  [](const ConceptScore& a, const ConceptScore& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.concept_id < b.concept_id;
                  });
        if (scores.size() > options.max_concepts_per_term)
            scores.resize(options.max_concepts_per_term);
    }
    return onto;
}

bool double_score_greater(const DoubleScore& a, const DoubleScore& b) {
    if (a.primary != b.primary) return a.primary > b.primary;
    return a.secondary > b.secondary;
}

std::strong_ordering double_score_compare(const DoubleScore& a, const DoubleScore& b) {
    if (double_score_greater(a, b)) return std::strong_ordering::greater;
    if (double_score_greater(b, a)) return std::strong_ordering::less;
    return std::strong_ordering::equal;
}

ConceptVector concept_weights(const text::TermVector& term_vec, const Ontology& onto,
                              std::size_t cap) {
    if (cap < 1) throw DomainError("concept_weights: cap must be >= 1");

    std::unordered_map<ConceptId, DoubleScore> acc;
    for (const auto& [term, weight] : term_vec) {
        auto it = onto.postings.find(term);
        if (it == onto.postings.end()) continue;
        for (const auto& cs : it->second) {
            auto& score = acc[cs.concept_id];
            score.primary += 1;
            score.secondary += weight * cs.score;
        }
    }

    ConceptVector out;
    out.reserve(acc.size());
    for (const auto& [id, score] : acc) out.push_back(ConceptWeight{id, score});
    std::sort(out.begin(), out.end(), [](const ConceptWeight& a, const ConceptWeight& b) {
        auto ord = double_score_compare(a.score, b.score);
        if (ord != std::strong_ordering::equal) return ord == std::strong_ordering::greater;
        return a.concept_id < b.concept_id;
    });
    if (out.size() > cap) out.resize(cap);
    return out;
}

void save_jsonl(const Ontology& onto, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw ConfigError("cannot write ontology: " + file.string());
    out << json{{"titles", onto.concept_titles}}.dump() << '\n';
    for (const auto& [term, scores] : onto.postings) {
        json row;
        row["term"] = term;
        auto& arr = row["concepts"] = json::array();
        for (const auto& cs : scores) arr.push_back(json::array({cs.concept_id, cs.score}));
        out << row.dump() << '\n';
    }
}

Ontology load_jsonl(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read ontology: " + file.string());
    Ontology onto;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("ontology file is empty");
    onto.concept_titles = json::parse(line).at("titles").get<std::vector<std::string>>();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json row = json::parse(line);
        auto& scores = onto.postings[row.at("term").get<std::string>()];
        for (const auto& c : row.at("concepts")) {
            scores.push_back(ConceptScore{c.at(0).get<ConceptId>(), c.at(1).get<double>()});
        }
    }
    return onto;
}

} // namespace secidx::onto
