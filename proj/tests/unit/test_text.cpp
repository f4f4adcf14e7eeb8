#include "secidx/error.hpp"
#include "secidx/text.hpp"

#include "unit/fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace secidx;

TEST_CASE("tokenize folds case and strips punctuation and digits") {
    CHECK(text::tokenize("Economy of England!") ==
          std::vector<std::string>{"economy", "of", "england"});
    CHECK(text::tokenize("").empty());
    CHECK(text::tokenize("2,000 years") == std::vector<std::string>{"years"});
    CHECK(text::tokenize("x86-64 CPUs") == std::vector<std::string>{"x", "cpus"});
}

TEST_CASE("drop_stopwords preserves order") {
    text::Stoplist stoplist{"of"};
    CHECK(text::drop_stopwords({"economy", "of", "england"}, stoplist) ==
          std::vector<std::string>{"economy", "england"});
    CHECK(text::drop_stopwords({"of", "of"}, stoplist).empty());
    CHECK(text::drop_stopwords({"economy", "england"}, {}) ==
          std::vector<std::string>{"economy", "england"});
}

TEST_CASE("stemming") {
    CHECK(text::stem("develops") == "develop");
    CHECK(text::stem("develop") == "develop");
    CHECK(text::stem("caresses") == "caress");
    CHECK(text::stem("ponies") == "poni");
    CHECK(text::stem("cats") == "cat");
    CHECK(text::stem("agreed") == "agre");
    CHECK(text::stem("plastered") == "plaster");
    CHECK(text::stem("motoring") == "motor");
    CHECK(text::stem("conflated") == "conflat");
    CHECK(text::stem("troubled") == "troubl");
    CHECK(text::stem("hopping") == "hop");
    CHECK(text::stem("relational") == "relat");
    CHECK(text::stem("rationalization") == "ration");
    CHECK(text::stem("happiness") == "happi");
    CHECK(text::stem("is") == "is"); // short words are left alone
}

TEST_CASE("stemming matches the published reference pairs") {
    const std::pair<const char*, const char*> vectors[] = {
        {"ties", "ti"},           {"feed", "feed"},         {"bled", "bled"},
        {"sing", "sing"},         {"sized", "size"},        {"tanned", "tan"},
        {"falling", "fall"},      {"hissing", "hiss"},      {"failing", "fail"},
        {"filing", "file"},       {"happy", "happi"},       {"sky", "sky"},
        {"relational", "relat"},  {"conditional", "condit"}, {"rational", "ration"},
        {"valenci", "valenc"},    {"hesitanci", "hesit"},   {"digitizer", "digit"},
        {"radicalli", "radic"},   {"differentli", "differ"}, {"vileli", "vile"},
        {"analogousli", "analog"}, {"predication", "predic"}, {"operator", "oper"},
        {"feudalism", "feudal"},  {"decisiveness", "decis"}, {"hopefulness", "hope"},
        {"callousness", "callous"}, {"formaliti", "formal"}, {"sensitiviti", "sensit"},
        {"sensibiliti", "sensibl"}, {"triplicate", "triplic"}, {"formative", "form"},
        {"formalize", "formal"},  {"electriciti", "electr"}, {"electrical", "electr"},
        {"hopeful", "hope"},      {"goodness", "good"},     {"revival", "reviv"},
        {"allowance", "allow"},   {"inference", "infer"},   {"airliner", "airlin"},
        {"gyroscopic", "gyroscop"}, {"adjustable", "adjust"}, {"defensible", "defens"},
        {"irritant", "irrit"},    {"replacement", "replac"}, {"adjustment", "adjust"},
        {"dependent", "depend"},  {"adoption", "adopt"},    {"communism", "commun"},
        {"activate", "activ"},    {"effective", "effect"},  {"rate", "rate"},
        {"cease", "ceas"},        {"controll", "control"},  {"roll", "roll"},
    };
    for (const auto& [input, expected] : vectors) {
        CAPTURE(input);
        CHECK(text::stem(input) == expected);
    }
}

TEST_CASE("stemming is idempotent over a corpus sample") {
    auto corpus = fixtures::make_corpus(17, {.docs = 20, .topics = 8, .queries = 0});
    for (const auto& doc : corpus.docs) {
        for (const auto& token : text::tokenize(doc.body)) {
            auto once = text::stem(token);
            CHECK(text::stem(once) == once);
        }
    }
}

TEST_CASE("tfidf uses raw counts and ln(N/df)") {
    text::Collection docs{
        {"d1", "apple apple banana"},
        {"d2", "banana cherry"},
        {"d3", "cherry banana"},
    };
    auto vectors = text::tfidf(docs, {});
    auto apple = text::stem("apple");
    auto cherry = text::stem("cherry");

    // "apple": count 2 in d1, df 1, N 3
    CHECK(vectors.at("d1").at(apple) == doctest::Approx(2.0 * std::log(3.0)));
    // "banana" appears in every document: weight 0, never stored
    CHECK(!vectors.at("d1").contains("banana"));
    CHECK(!vectors.at("d2").contains("banana"));
    // "cherry": df 2
    CHECK(vectors.at("d2").at(cherry) == doctest::Approx(std::log(3.0 / 2.0)));

    SUBCASE("single-document collection has all idf zero") {
        auto single = text::tfidf({{"only", "alpha beta alpha"}}, {});
        CHECK(single.at("only").empty());
    }
    SUBCASE("duplicate doc ids are rejected") {
        CHECK_THROWS_AS(text::tfidf({{"d", "a"}, {"d", "b"}}, {}), DomainError);
    }
}

TEST_CASE("plain inverted index equals the brute-force term-doc table") {
    auto corpus = fixtures::make_corpus(23, {.docs = 30, .topics = 10, .queries = 0});
    auto stoplist = fixtures::glue_stoplist();
    auto index = text::build_plain_index(corpus.docs, stoplist);
    auto vectors = text::tfidf(corpus.docs, stoplist);

    std::size_t postings = 0;
    for (const auto& [term, list] : index) {
        for (std::size_t i = 1; i < list.size(); ++i) CHECK(list[i - 1].doc_id < list[i].doc_id);
        for (const auto& posting : list) {
            CHECK(vectors.at(posting.doc_id).at(term) == doctest::Approx(posting.weight));
            postings++;
        }
    }
    std::size_t expected = 0;
    for (const auto& [_, vec] : vectors) expected += vec.size();
    CHECK(postings == expected);

    CHECK(text::build_plain_index({}, stoplist).empty());
}

TEST_CASE("every positive-weight processed term is recoverable from the postings") {
    auto corpus = fixtures::make_corpus(37, {.docs = 25, .topics = 9, .queries = 0});
    auto stoplist = fixtures::glue_stoplist();
    auto index = text::build_plain_index(corpus.docs, stoplist);

    std::map<std::string, std::set<std::string>> from_postings;
    for (const auto& [term, postings] : index)
        for (const auto& posting : postings) from_postings[posting.doc_id].insert(term);

    // document frequency over processed tokens
    std::map<std::string, std::size_t> df;
    std::map<std::string, std::set<std::string>> processed;
    for (const auto& doc : corpus.docs) {
        for (const auto& term : text::process(doc.body, stoplist)) processed[doc.id].insert(term);
    }
    for (const auto& [_, terms] : processed)
        for (const auto& term : terms) df[term]++;

    for (const auto& doc : corpus.docs) {
        std::set<std::string> expected;
        for (const auto& term : processed[doc.id])
            if (df[term] < corpus.docs.size()) expected.insert(term); // idf > 0
        CHECK(from_postings[doc.id] == expected);
    }
}

TEST_CASE("index jsonl round trip") {
    fixtures::TempDir dir("textindex");
    auto corpus = fixtures::make_corpus(29, {.docs = 10, .topics = 5, .queries = 0});
    auto index = text::build_plain_index(corpus.docs, {});
    auto file = dir.path() / "index.jsonl";
    text::save_index_jsonl(index, file);
    CHECK(text::load_index_jsonl(file) == index);
}

TEST_CASE("eval metrics") {
    using S = std::set<std::string>;
    auto m = text::eval_metrics(S{"a", "b"}, S{"a", "c"});
    CHECK(m.accuracy == doctest::Approx(0.5));
    CHECK(m.recall == doctest::Approx(0.5));

    auto perfect = text::eval_metrics(S{"a", "b"}, S{"a", "b"});
    CHECK(perfect.accuracy == doctest::Approx(1.0));
    CHECK(perfect.recall == doctest::Approx(1.0));

    auto disjoint = text::eval_metrics(S{"a"}, S{"b"});
    CHECK(disjoint.accuracy == doctest::Approx(0.0));
    CHECK(disjoint.recall == doctest::Approx(0.0));

    auto empty = text::eval_metrics(S{}, S{});
    CHECK(empty.accuracy == 0.0);
    CHECK(empty.recall == 0.0);
}

TEST_CASE("corpus loading and pipeline determinism") {
    fixtures::TempDir dir("corpus");
    auto corpus = fixtures::make_corpus(31, {.docs = 12, .topics = 4, .queries = 0});
    fixtures::write_corpus_dir(dir.path(), corpus.docs);
    auto loaded = text::load_corpus_dir(dir.path());
    REQUIRE(loaded.size() == corpus.docs.size());
    CHECK(loaded.front().id == corpus.docs.front().id);

    auto stoplist = fixtures::glue_stoplist();
    fixtures::TempDir out("indexes");
    text::save_index_jsonl(text::build_plain_index(loaded, stoplist), out.path() / "a.jsonl");
    text::save_index_jsonl(text::build_plain_index(loaded, stoplist), out.path() / "b.jsonl");
    std::ifstream a(out.path() / "a.jsonl"), b(out.path() / "b.jsonl");
    std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}
