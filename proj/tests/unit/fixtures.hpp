#pragma once

#include "secidx/rng.hpp"
#include "secidx/text.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fixtures {

// Synthetic topical corpus: a vocabulary of invented words grouped into
// topics, one concept page per topic, documents mixing a few topics, and
// queries drawn from single topics. Fully deterministic under the seed.
struct SyntheticCorpus {
    secidx::text::Collection docs;
    secidx::text::Collection pages;
    std::vector<std::vector<std::string>> queries;
    std::vector<std::vector<std::string>> topic_words;
};

struct CorpusSpec {
    std::size_t docs = 200;
    std::size_t topics = 50;
    std::size_t queries = 50;
    std::size_t vocabulary = 0; // 0: derived from the topic count
    std::size_t words_per_topic = 8;
    std::size_t doc_tokens = 60;
    std::size_t page_repetitions = 6;
};

SyntheticCorpus make_corpus(std::uint64_t seed, const CorpusSpec& spec = {});

secidx::text::Stoplist glue_stoplist();

void write_corpus_dir(const std::filesystem::path& dir, const secidx::text::Collection& docs);

// Unique directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace fixtures
