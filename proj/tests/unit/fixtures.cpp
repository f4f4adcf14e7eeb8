#include "unit/fixtures.hpp"

#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

namespace fixtures {
namespace {

using secidx::Rng;

const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
const char* kNuclei[] = {"a", "e", "i", "o", "u"};

std::string make_word(Rng& rng) {
    std::string word;
    std::size_t syllables = 2 + rng.uniform_u64(0, 1);
    for (std::size_t s = 0; s < syllables; ++s) {
        word += kOnsets[rng.uniform_u64(0, std::size(kOnsets) - 1)];
        word += kNuclei[rng.uniform_u64(0, std::size(kNuclei) - 1)];
    }
    word += kOnsets[rng.uniform_u64(0, std::size(kOnsets) - 1)];
    return word;
}

const std::vector<std::string> kGlue = {"the", "of", "and", "with", "from"};

} // namespace

secidx::text::Stoplist glue_stoplist() {
    return {kGlue.begin(), kGlue.end()};
}

SyntheticCorpus make_corpus(std::uint64_t seed, const CorpusSpec& spec) {
    Rng rng(seed);
    SyntheticCorpus corpus;

    // shared vocabulary pool; topics draw overlapping word subsets so a
    // term maps to several concepts and documents share concepts across
    // topics
    std::size_t pool_size = spec.vocabulary
                                ? spec.vocabulary
                                : std::max<std::size_t>(24, spec.topics * spec.words_per_topic / 3);
    std::set<std::string> used(kGlue.begin(), kGlue.end());
    std::vector<std::string> pool;
    while (pool.size() < pool_size) {
        auto word = make_word(rng);
        if (used.insert(word).second) pool.push_back(word);
    }

    corpus.topic_words.resize(spec.topics);
    for (auto& words : corpus.topic_words) {
        words = rng.sample(pool, spec.words_per_topic);
    }

    // one concept page per topic
    for (std::size_t t = 0; t < spec.topics; ++t) {
        std::ostringstream body;
        for (std::size_t rep = 0; rep < spec.page_repetitions; ++rep) {
            for (const auto& word : corpus.topic_words[t]) {
                body << word << ' ';
                if (rng.bernoulli(0.2)) body << kGlue[rng.uniform_u64(0, kGlue.size() - 1)] << ' ';
            }
        }
        std::ostringstream id;
        id << "topic" << (t < 10 ? "0" : "") << t;
        corpus.pages.push_back({id.str(), body.str()});
    }

    // documents mixing one to three topics
    for (std::size_t d = 0; d < spec.docs; ++d) {
        std::size_t mixed = 1 + rng.uniform_u64(0, 2);
        std::vector<std::size_t> topics;
        for (std::size_t i = 0; i < mixed; ++i)
            topics.push_back(rng.uniform_u64(0, spec.topics - 1));
        std::ostringstream body;
        for (std::size_t tok = 0; tok < spec.doc_tokens; ++tok) {
            const auto& words = corpus.topic_words[topics[rng.uniform_u64(0, topics.size() - 1)]];
            body << words[rng.uniform_u64(0, words.size() - 1)] << ' ';
            if (rng.bernoulli(0.15)) body << kGlue[rng.uniform_u64(0, kGlue.size() - 1)] << ' ';
        }
        std::ostringstream id;
        id << "doc" << (d < 100 ? (d < 10 ? "00" : "0") : "") << d;
        corpus.docs.push_back({id.str(), body.str()});
    }

    // queries: a few words of one topic
    for (std::size_t q = 0; q < spec.queries; ++q) {
        const auto& words = corpus.topic_words[rng.uniform_u64(0, spec.topics - 1)];
        std::vector<std::string> query;
        std::size_t terms = 2 + rng.uniform_u64(0, 1);
        for (std::size_t i = 0; i < terms; ++i)
            query.push_back(words[rng.uniform_u64(0, words.size() - 1)]);
        corpus.queries.push_back(std::move(query));
    }
    return corpus;
}

void write_corpus_dir(const std::filesystem::path& dir, const secidx::text::Collection& docs) {
    std::filesystem::create_directories(dir);
    for (const auto& doc : docs) {
        std::ofstream out(dir / (doc.id + ".txt"), std::ios::trunc | std::ios::binary);
        out << doc.body;
    }
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("secidx_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

} // namespace fixtures
