#pragma once

#include "secidx/stemmer.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace secidx::text {

struct Document {
    std::string id;   // unique within a collection
    std::string body; // UTF-8
};

using Collection = std::vector<Document>;

// Sparse term -> weight map; zero weights are never stored.
using TermVector = std::map<std::string, double>;

struct Posting {
    std::string doc_id;
    double weight;

    bool operator==(const Posting&) const = default;
};

// term -> postings sorted by doc_id, one entry per (term, doc)
using PlainInvertedIndex = std::map<std::string, std::vector<Posting>>;

using Stoplist = std::unordered_set<std::string>;

// Lowercase ASCII-alphabetic runs; digits and punctuation separate tokens
// and are discarded.
std::vector<std::string> tokenize(std::string_view input);

// Order-preserving stop-word filter.
std::vector<std::string> drop_stopwords(const std::vector<std::string>& terms,
                                        const Stoplist& stoplist);

Stoplist load_stoplist(const std::filesystem::path& file);

// Full pipeline: tokenize, drop stop words, stem.
std::vector<std::string> process(std::string_view input, const Stoplist& stoplist);

// weight(t, d) = tf(t, d) * ln(N / df(t)), tf = raw count.
std::map<std::string, TermVector> tfidf(const Collection& collection,
                                        const Stoplist& stoplist);

PlainInvertedIndex build_plain_index(const Collection& collection,
                                     const Stoplist& stoplist);

struct Metrics {
    double accuracy = 0.0;
    double recall = 0.0;
};

// accuracy = |returned & relevant| / |returned|, recall = ... / |relevant|;
// 0 when the denominator is 0.
Metrics eval_metrics(const std::set<std::string>& returned,
                     const std::set<std::string>& relevant);

// Directory of UTF-8 .txt files; the file stem is the doc id.
Collection load_corpus_dir(const std::filesystem::path& dir);

// JSON lines, one {"term": ..., "postings": [[doc_id, weight], ...]} per line.
void save_index_jsonl(const PlainInvertedIndex& index, const std::filesystem::path& file);
PlainInvertedIndex load_index_jsonl(const std::filesystem::path& file);

} // namespace secidx::text
