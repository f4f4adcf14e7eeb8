#include "secidx/error.hpp"
#include "secidx/ontology.hpp"

#include "unit/fixtures.hpp"

#include <doctest.h>

#include <algorithm>

using namespace secidx;

TEST_CASE("double-score ordering") {
    // primary dominates even against a larger secondary score
    CHECK(onto::double_score_greater({7, 0.20}, {6, 0.41}));
    CHECK(onto::double_score_greater({2, 0.1}, {1, 0.9}));
    CHECK(onto::double_score_greater({3, 0.6}, {3, 0.5}));
    CHECK(!onto::double_score_greater({3, 0.5}, {3, 0.5}));
    CHECK(onto::double_score_compare({3, 0.5}, {3, 0.5}) == std::strong_ordering::equal);
    CHECK(onto::double_score_compare({1, 0.9}, {2, 0.1}) == std::strong_ordering::less);
}

TEST_CASE("double-score ordering is a strict weak ordering") {
    Rng rng(97);
    std::vector<onto::DoubleScore> scores;
    for (int i = 0; i < 60; ++i)
        scores.push_back({static_cast<std::uint32_t>(rng.uniform_u64(0, 3)),
                          static_cast<double>(rng.uniform_u64(0, 3)) / 2.0});
    for (const auto& a : scores) {
        CHECK(!onto::double_score_greater(a, a)); // irreflexive
        for (const auto& b : scores) {
            if (onto::double_score_greater(a, b)) CHECK(!onto::double_score_greater(b, a));
            for (const auto& c : scores) {
                if (onto::double_score_greater(a, b) && onto::double_score_greater(b, c))
                    CHECK(onto::double_score_greater(a, c));
            }
        }
    }
    auto sorted = scores;
    std::sort(sorted.begin(), sorted.end(), onto::double_score_greater);
    CHECK(std::is_sorted(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return onto::double_score_greater(a, b);
    }));
}

TEST_CASE("concept mapping on a hand-enumerable ontology") {
    onto::Ontology onto;
    onto.concept_titles = {"c1", "c2"};
    onto.postings["t1"] = {{0, 2.0}, {1, 1.0}};
    onto.postings["t2"] = {{0, 3.0}};

    text::TermVector vec{{"t1", 1.0}, {"t2", 1.0}};
    auto concepts = onto::concept_weights(vec, onto, 10);
    REQUIRE(concepts.size() == 2);
    CHECK(concepts[0].concept_id == 0);
    CHECK(concepts[0].score.primary == 2);
    CHECK(concepts[0].score.secondary == doctest::Approx(5.0)); // 1*2 + 1*3
    CHECK(concepts[1].concept_id == 1);
    CHECK(concepts[1].score.primary == 1);
    CHECK(concepts[1].score.secondary == doctest::Approx(1.0));

    SUBCASE("empty term vector maps to nothing") {
        CHECK(onto::concept_weights({}, onto, 5).empty());
    }
    SUBCASE("cap keeps the top X") {
        auto only_one = onto::concept_weights(vec, onto, 1);
        REQUIRE(only_one.size() == 1);
        CHECK(only_one[0].concept_id == 0);
    }
    SUBCASE("brute force over all term-concept pairs agrees") {
        std::map<onto::ConceptId, onto::DoubleScore> expected;
        for (const auto& [term, weight] : vec) {
            for (const auto& cs : onto.postings.at(term)) {
                expected[cs.concept_id].primary += 1;
                expected[cs.concept_id].secondary += weight * cs.score;
            }
        }
        for (const auto& cw : concepts) {
            CHECK(expected.at(cw.concept_id).primary == cw.score.primary);
            CHECK(expected.at(cw.concept_id).secondary == doctest::Approx(cw.score.secondary));
        }
    }
}

TEST_CASE("multi-term concepts outrank frequency-heavy single-term concepts") {
    // a concept matched by both query terms ranks above a concept matched
    // by one term with a much larger association score
    onto::Ontology onto;
    onto.concept_titles = {"broad", "narrow"};
    onto.postings["estonia"] = {{1, 9.0}, {0, 0.05}};
    onto.postings["economy"] = {{0, 0.02}};

    text::TermVector query{{"estonia", 1.0}, {"economy", 1.0}};
    auto concepts = onto::concept_weights(query, onto, 10);
    REQUIRE(concepts.size() == 2);
    CHECK(concepts[0].concept_id == 0);
    CHECK(concepts[0].score.primary == 2);
    CHECK(concepts[1].score.primary == 1);
    CHECK(concepts[1].score.secondary > concepts[0].score.secondary);
}

TEST_CASE("build_onto transposes page vectors") {
    text::Collection pages{
        {"pageA", "alpha beta alpha gamma"},
        {"pageB", "beta beta delta"},
        {"pageC", "gamma delta delta alpha"},
    };
    onto::BuildOptions options;
    options.min_page_terms = 1;
    auto onto = onto::build_onto(pages, {}, options);
    CHECK(onto.concept_count() == 3);

    auto vectors = text::tfidf(pages, {});
    for (const auto& [term, scores] : onto.postings) {
        for (const auto& cs : scores) {
            const auto& title = onto.concept_titles.at(cs.concept_id);
            CHECK(vectors.at(title).at(term) == doctest::Approx(cs.score));
        }
        for (std::size_t i = 1; i < scores.size(); ++i)
            CHECK(scores[i - 1].score >= scores[i].score);
    }

    SUBCASE("single page, single term") {
        onto::BuildOptions opts;
        opts.min_page_terms = 1;
        auto single = onto::build_onto({{"c1", "tok tok other"}}, {}, opts);
        // one-page collections have idf 0 everywhere, so no postings
        CHECK(single.concept_count() == 1);
        CHECK(single.postings.empty());
    }
    SUBCASE("cap = 2 keeps the two best concepts") {
        onto::BuildOptions opts;
        opts.min_page_terms = 1;
        opts.max_concepts_per_term = 2;
        text::Collection many{
            {"p1", "shared shared shared filler1"},
            {"p2", "shared shared filler2"},
            {"p3", "shared filler3"},
            {"p4", "other1 other2"},
        };
        auto capped = onto::build_onto(many, {}, opts);
        auto key = text::stem("shared");
        REQUIRE(capped.postings.contains(key));
        CHECK(capped.postings.at(key).size() == 2);
        CHECK(capped.postings.at(key)[0].score >= capped.postings.at(key)[1].score);
    }
    SUBCASE("short pages are skipped") {
        onto::BuildOptions opts;
        opts.min_page_terms = 4;
        auto filtered = onto::build_onto(pages, {}, opts);
        CHECK(filtered.concept_count() == 2); // pageB has only 3 tokens
    }
    SUBCASE("empty corpus is an error") {
        CHECK_THROWS_AS(onto::build_onto({}, {}, options), DomainError);
    }
}

TEST_CASE("primary score is bounded by the distinct term count and grows by one per new term") {
    auto corpus = fixtures::make_corpus(41, {.docs = 0, .topics = 12, .queries = 0});
    onto::BuildOptions options;
    options.min_page_terms = 1;
    auto onto = onto::build_onto(corpus.pages, fixtures::glue_stoplist(), options);

    text::TermVector vec;
    auto& topic = corpus.topic_words[3];
    vec[text::stem(topic[0])] = 1.0;
    vec[text::stem(topic[1])] = 0.5;

    auto before = onto::concept_weights(vec, onto, 100);
    for (const auto& cw : before) CHECK(cw.score.primary <= vec.size());

    // add one more mapped term not yet in the vector
    std::string added;
    for (const auto& word : topic) {
        auto stem = text::stem(word);
        if (!vec.contains(stem) && onto.postings.contains(stem)) {
            added = stem;
            break;
        }
    }
    REQUIRE(!added.empty());
    vec[added] = 2.0;
    auto after = onto::concept_weights(vec, onto, 100);

    auto find = [](const onto::ConceptVector& v, onto::ConceptId id) -> const onto::ConceptWeight* {
        for (const auto& cw : v)
            if (cw.concept_id == id) return &cw;
        return nullptr;
    };
    bool saw_increase = false;
    for (const auto& cs : onto.postings.at(added)) {
        const auto* was = find(before, cs.concept_id);
        const auto* now = find(after, cs.concept_id);
        REQUIRE(now != nullptr);
        std::uint32_t expected = (was ? was->score.primary : 0) + 1;
        CHECK(now->score.primary == expected);
        if (was) CHECK(now->score.secondary >= was->score.secondary);
        saw_increase = true;
    }
    CHECK(saw_increase);
}

TEST_CASE("ontology jsonl round trip") {
    fixtures::TempDir dir("onto");
    auto corpus = fixtures::make_corpus(43, {.docs = 0, .topics = 6, .queries = 0});
    onto::BuildOptions options;
    options.min_page_terms = 1;
    auto onto = onto::build_onto(corpus.pages, {}, options);
    auto file = dir.path() / "onto.jsonl";
    onto::save_jsonl(onto, file);
    auto loaded = onto::load_jsonl(file);
    CHECK(loaded.concept_titles == onto.concept_titles);
    CHECK(loaded.postings == onto.postings);
}
