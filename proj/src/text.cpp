#include "secidx/text.hpp"

#include "secidx/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace secidx::text {

using nlohmann::json;

std::vector<std::string> tokenize(std::string_view input) {
    std::vector<std::string> out;
    std::string current;
    for (char c : input) {
        if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else if (c >= 'a' && c <= 'z') {
            current.push_back(c);
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::vector<std::string> drop_stopwords(const std::vector<std::string>& terms,
                                        const Stoplist& stoplist) {
    std::vector<std::string> out;
    out.reserve(terms.size());
    for (const auto& t : terms)
        if (!stoplist.contains(t)) out.push_back(t);
    return out;
}

Stoplist load_stoplist(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open stop list: " + file.string());
    Stoplist out;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) out.insert(line);
    }
    return out;
}

std::vector<std::string> process(std::string_view input, const Stoplist& stoplist) {
    auto terms = drop_stopwords(tokenize(input), stoplist);
    for (auto& t : terms) t = stem(t);
    return terms;
}

std::map<std::string, TermVector> tfidf(const Collection& collection,
                                        const Stoplist& stoplist) {
    if (collection.empty()) throw DomainError("tfidf: empty collection");

    std::map<std::string, std::unordered_map<std::string, std::size_t>> counts;
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& doc : collection) {
        if (counts.contains(doc.id))
            throw DomainError("duplicate doc_id: " + doc.id);
        auto& c = counts[doc.id];
        for (const auto& term : process(doc.body, stoplist)) c[term]++;
        for (const auto& [term, _] : c) df[term]++;
    }

    const double n = static_cast<double>(collection.size());
    std::map<std::string, TermVector> out;
    for (auto& [doc_id, c] : counts) {
        TermVector vec;
        for (const auto& [term, tf] : c) {
            double w = static_cast<double>(tf) * std::log(n / static_cast<double>(df.at(term)));
            if (w > 0.0) vec.emplace(term, w);
        }
        out.emplace(doc_id, std::move(vec));
    }
    return out;
}

PlainInvertedIndex build_plain_index(const Collection& collection,
                                     const Stoplist& stoplist) {
    PlainInvertedIndex index;
    if (collection.empty()) return index;
    for (const auto& [doc_id, vec] : tfidf(collection, stoplist)) {
        for (const auto& [term, weight] : vec) {
            index[term].push_back(Posting{doc_id, weight});
        }
    }
    for (auto& [_, postings] : index) {
        std::sort(postings.begin(), postings.end(),
                  [](const Posting& a, const Posting& b) { return a.doc_id < b.doc_id; });
    }
    return index;
}

Metrics eval_metrics(const std::set<std::string>& returned,
                     const std::set<std::string>& relevant) {
    std::size_t hits = 0;
    for (const auto& d : returned)
        if (relevant.contains(d)) hits++;
    Metrics m;
    if (!returned.empty()) m.accuracy = static_cast<double>(hits) / static_cast<double>(returned.size());
    if (!relevant.empty()) m.recall = static_cast<double>(hits) / static_cast<double>(relevant.size());
    return m;
}

Collection load_corpus_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw ConfigError("corpus directory not found: " + dir.string());
    Collection out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream body;
        body << in.rdbuf();
        out.push_back(Document{entry.path().stem().string(), body.str()});
    }
    std::sort(out.begin(), out.end(),
              [](const Document& a, const Document& b) { return a.id < b.id; });
    return out;
}

void save_index_jsonl(const PlainInvertedIndex& index, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw ConfigError("cannot write index: " + file.string());
    for (const auto& [term, postings] : index) {
        json row;
        row["term"] = term;
        auto& arr = row["postings"] = json::array();
        for (const auto& p : postings) arr.push_back(json::array({p.doc_id, p.weight}));
        out << row.dump() << '\n';
    }
}

PlainInvertedIndex load_index_jsonl(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read index: " + file.string());
    PlainInvertedIndex index;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json row = json::parse(line);
        auto& postings = index[row.at("term").get<std::string>()];
        for (const auto& p : row.at("postings")) {
            postings.push_back(Posting{p.at(0).get<std::string>(), p.at(1).get<double>()});
        }
    }
    return index;
}

} // namespace secidx::text
