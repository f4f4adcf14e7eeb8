#include "secidx/siis.hpp"

#include "secidx/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace secidx::siis {
namespace {

using nlohmann::json;

std::vector<std::string> process_query(const std::vector<std::string>& query_terms,
                                       const text::Stoplist& stoplist) {
    std::vector<std::string> out;
    for (const auto& raw : query_terms)
        for (auto& term : text::process(raw, stoplist)) out.push_back(std::move(term));
    return out;
}

CtId pick_ct(const OwnerScoreTable& t1, std::uint32_t score, Rng& rng) {
    auto it = t1.ids_by_score.find(score);
    if (it == t1.ids_by_score.end() || it->second.empty())
        throw DomainError("score table has no ciphertexts for score " + std::to_string(score));
    return it->second[rng.uniform_u64(0, it->second.size() - 1)];
}

const he::Ciphertext& resolve(const ServerScoreTable& t2, CtId id) {
    auto it = t2.ct_by_id.find(id);
    if (it == t2.ct_by_id.end())
        throw NotFoundError("ciphertext id " + std::to_string(id) + " not in T2");
    return it->second;
}

std::uint32_t quantize_secondary(double value, double max_value, int inv_max) {
    if (max_value <= 0.0) return 0;
    return static_cast<std::uint32_t>(
        std::llround(static_cast<double>(inv_max) * value / max_value));
}

} // namespace

std::size_t OwnerScoreTable::total_ids() const {
    std::size_t total = 0;
    for (const auto& [_, ids] : ids_by_score) total += ids.size();
    return total;
}

std::uint64_t nc_zero(std::uint64_t nc, int ns, int K) {
    return nc * static_cast<std::uint64_t>(ns) * static_cast<std::uint64_t>(K) / 20;
}

TabGenResult tabgen(const he::PublicKey& pk, int inv_max, std::uint64_t nc, int K, Rng& rng) {
    if (inv_max < 1) throw DomainError("tabgen: inv_max must be >= 1");
    if (nc < 1) throw DomainError("tabgen: NC must be >= 1");
    if (K < 1 || K > 10) throw DomainError("tabgen: K must lie in [1, 10]");

    const int ns = inv_max + 1;
    const std::uint64_t zeros = nc_zero(nc, ns, K);
    const std::uint64_t total = zeros + nc * static_cast<std::uint64_t>(ns - 1);

    std::vector<CtId> ids(total);
    for (std::uint64_t i = 0; i < total; ++i) ids[i] = i;
    rng.shuffle(ids);

    TabGenResult out;
    out.t1.inv_max = inv_max;
    std::size_t next = 0;
    auto emit = [&](std::uint32_t score, std::uint64_t count) {
        auto& bucket = out.t1.ids_by_score[score];
        bucket.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            CtId id = ids[next++];
            bucket.push_back(id);
            out.t2.ct_by_id.emplace(id, he::enc(pk, score, rng));
        }
        std::sort(bucket.begin(), bucket.end());
    };
    emit(0, zeros);
    for (int s = 1; s <= inv_max; ++s) emit(static_cast<std::uint32_t>(s), nc);
    return out;
}

std::uint64_t dummy_count(std::uint64_t dn, int K, Rng& rng) {
    if (K == 0) return 0; // test hook: dummies disabled
    if (K < 0 || K > 10) throw DomainError("dummy_count: K must lie in [0, 10]");
    if (dn == 0) return 0;
    std::uint64_t u = rng.uniform_u64(1, static_cast<std::uint64_t>(10 * K));
    return dn * u / 100;
}

BuildResult build_indexes(const text::Collection& collection, const text::Stoplist& stoplist,
                          const onto::Ontology& onto,
                          const std::map<std::string, std::set<std::string>>& users,
                          const OwnerScoreTable& t1, const BuildOptions& options, Rng& rng) {
    if (collection.empty()) throw DomainError("build_indexes: empty collection");

    BuildResult out;

    // aliases: a random permutation over the documents
    {
        std::vector<Alias> pool(collection.size());
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
        rng.shuffle(pool);
        for (std::size_t i = 0; i < collection.size(); ++i) {
            out.aliases.alias_of[collection[i].id] = pool[i];
            out.aliases.id_of[pool[i]] = collection[i].id;
        }
    }

    // quantized concept scores per document
    auto vectors = text::tfidf(collection, stoplist);
    std::map<std::string, onto::ConceptVector> concepts;
    double max_secondary = 0.0;
    for (const auto& doc : collection) {
        auto cv = onto::concept_weights(vectors.at(doc.id), onto, options.concept_cap);
        for (const auto& cw : cv) max_secondary = std::max(max_secondary, cw.score.secondary);
        concepts.emplace(doc.id, std::move(cv));
    }
    out.oracle.max_secondary = max_secondary;

    std::map<onto::ConceptId, std::vector<Alias>> real_by_concept;
    for (const auto& doc : collection) {
        Alias alias = out.aliases.alias_of.at(doc.id);
        auto& scores = out.oracle.doc_scores[alias];
        for (const auto& cw : concepts.at(doc.id)) {
            std::uint32_t p = std::min<std::uint32_t>(cw.score.primary,
                                                      static_cast<std::uint32_t>(options.inv_max));
            std::uint32_t s = quantize_secondary(cw.score.secondary, max_secondary, options.inv_max);
            scores[cw.concept_id] = {p, s};
            real_by_concept[cw.concept_id].push_back(alias);
        }
    }

    std::vector<Alias> all_aliases;
    all_aliases.reserve(collection.size());
    for (const auto& [alias, _] : out.aliases.id_of) all_aliases.push_back(alias);

    // index I1: real postings plus dummies drawn from documents that do not
    // contain the concept
    for (auto& [concept_id, real_aliases] : real_by_concept) {
        auto& postings = out.i1.entries[concept_id];
        std::set<Alias> taken(real_aliases.begin(), real_aliases.end());
        out.oracle.real_postings[concept_id] = taken;
        for (Alias alias : real_aliases) {
            const auto& [p, s] = out.oracle.doc_scores.at(alias).at(concept_id);
            postings.push_back(I1Posting{alias, pick_ct(t1, p, rng), pick_ct(t1, s, rng)});
        }
        std::uint64_t ddn = dummy_count(real_aliases.size(), options.K, rng);
        std::vector<Alias> complement;
        for (Alias a : all_aliases)
            if (!taken.contains(a)) complement.push_back(a);
        for (Alias alias : rng.sample(std::move(complement), ddn)) {
            postings.push_back(I1Posting{alias, pick_ct(t1, 0, rng), pick_ct(t1, 0, rng)});
        }
        std::sort(postings.begin(), postings.end(),
                  [](const I1Posting& a, const I1Posting& b) { return a.alias < b.alias; });
    }

    // index I2: accessible documents with random access scores, dummies
    // with zero
    for (const auto& [user_id, docs] : users) {
        auto& postings = out.i2.entries[user_id];
        auto& scores = out.oracle.access_scores[user_id];
        std::set<Alias> taken;
        for (const auto& doc_id : docs) {
            auto it = out.aliases.alias_of.find(doc_id);
            if (it == out.aliases.alias_of.end())
                throw NotFoundError("user " + user_id + " references unknown doc " + doc_id);
            Alias alias = it->second;
            auto score = static_cast<std::uint32_t>(
                rng.uniform_u64(1, static_cast<std::uint64_t>(options.inv_max)));
            scores[alias] = score;
            taken.insert(alias);
            postings.push_back(I2Posting{alias, pick_ct(t1, score, rng)});
        }
        std::uint64_t ddn = dummy_count(docs.size(), options.K, rng);
        std::vector<Alias> complement;
        for (Alias a : all_aliases)
            if (!taken.contains(a)) complement.push_back(a);
        for (Alias alias : rng.sample(std::move(complement), ddn)) {
            postings.push_back(I2Posting{alias, pick_ct(t1, 0, rng)});
        }
        std::sort(postings.begin(), postings.end(),
                  [](const I2Posting& a, const I2Posting& b) { return a.alias < b.alias; });
    }

    return out;
}

Trapdoor trapdoor(const std::vector<std::string>& query_terms, const text::Stoplist& stoplist,
                  const onto::Ontology& onto, std::size_t x, std::size_t y, int inv_max,
                  Rng& rng) {
    if (x < 1 || x > y) throw DomainError("trapdoor: need 1 <= x <= y");

    text::TermVector binary;
    for (const auto& term : process_query(query_terms, stoplist)) binary[term] = 1.0;
    auto top = onto::concept_weights(binary, onto, y);
    if (top.empty()) throw DomainError("trapdoor: no query term maps to any concept");

    double max_secondary = 0.0;
    for (const auto& cw : top) max_secondary = std::max(max_secondary, cw.score.secondary);

    std::vector<std::size_t> picks(top.size());
    for (std::size_t i = 0; i < picks.size(); ++i) picks[i] = i;
    picks = rng.sample(std::move(picks), std::min(x, top.size()));
    std::sort(picks.begin(), picks.end());

    Trapdoor out;
    for (std::size_t i : picks) {
        const auto& cw = top[i];
        out.concepts.push_back(TrapdoorConcept{
            cw.concept_id,
            std::min<std::uint32_t>(cw.score.primary, static_cast<std::uint32_t>(inv_max)),
            quantize_secondary(cw.score.secondary, max_secondary, inv_max)});
    }
    std::sort(out.concepts.begin(), out.concepts.end(),
              [](const TrapdoorConcept& a, const TrapdoorConcept& b) {
                  return a.concept_id < b.concept_id;
              });
    return out;
}

SearchResult search(const SecureIndexI1& i1, const AccessIndexI2& i2,
                    const ServerScoreTable& t2, const he::PublicKey& pk,
                    const Trapdoor& trapdoor, const std::string& user_id, std::size_t k,
                    int inv_max) {
    if (k < 1) throw DomainError("search: k must be >= 1");
    mpz_class worst = 0;
    for (const auto& tc : trapdoor.concepts)
        worst += mpz_class(std::max(tc.cp, tc.cs)) * inv_max;
    if (worst >= pk.n) {
        throw DomainError("modulus too small for exact score aggregation over this trapdoor");
    }
    auto user_it = i2.entries.find(user_id);
    if (user_it == i2.entries.end()) throw NotFoundError("unknown user: " + user_id);

    std::map<Alias, CtId> user_access;
    for (const auto& p : user_it->second) user_access.emplace(p.alias, p.access_ct);

    struct Match {
        std::uint32_t cp, cs;
        CtId primary_ct, secondary_ct;
    };
    std::map<Alias, std::vector<Match>> matches;
    for (const auto& tc : trapdoor.concepts) {
        auto entry = i1.entries.find(tc.concept_id);
        if (entry == i1.entries.end()) continue; // concept absent from this collection
        for (const auto& posting : entry->second) {
            if (!user_access.contains(posting.alias)) continue;
            matches[posting.alias].push_back(
                Match{tc.cp, tc.cs, posting.primary_ct, posting.secondary_ct});
        }
    }

    // categories: a document in i selected entries beats any document in
    // fewer; alias ascending inside a category
    std::vector<std::pair<Alias, const std::vector<Match>*>> candidates;
    candidates.reserve(matches.size());
    for (const auto& [alias, ms] : matches) candidates.emplace_back(alias, &ms);
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        if (a.second->size() != b.second->size()) return a.second->size() > b.second->size();
        return a.first < b.first;
    });
    if (candidates.size() > k) candidates.resize(k);

    SearchResult out;
    out.reserve(candidates.size());
    for (const auto& [alias, ms] : candidates) {
        he::Ciphertext x = he::mul_plain(pk, resolve(t2, (*ms)[0].primary_ct), (*ms)[0].cp);
        he::Ciphertext y = he::mul_plain(pk, resolve(t2, (*ms)[0].secondary_ct), (*ms)[0].cs);
        for (std::size_t i = 1; i < ms->size(); ++i) {
            const auto& m = (*ms)[i];
            x = he::add(pk, x, he::mul_plain(pk, resolve(t2, m.primary_ct), m.cp));
            y = he::add(pk, y, he::mul_plain(pk, resolve(t2, m.secondary_ct), m.cs));
        }
        out.push_back(ResultTriple{alias, std::move(x), std::move(y),
                                   resolve(t2, user_access.at(alias))});
    }
    return out;
}

std::vector<RankedDoc> client_sort(const SearchResult& result, const he::SecretKey& sk,
                                   const he::PublicKey& pk) {
    std::vector<RankedDoc> out;
    for (const auto& triple : result) {
        RankedDoc doc;
        doc.alias = triple.alias;
        doc.x = he::dec(sk, pk, triple.x).get_ui();
        doc.y = he::dec(sk, pk, triple.y).get_ui();
        doc.z = he::dec(sk, pk, triple.z).get_ui();
        if (doc.x == 0) continue; // dummy in every matched entry
        if (doc.z == 0) continue; // not accessible by this user
        out.push_back(doc);
    }
    std::sort(out.begin(), out.end(), [](const RankedDoc& a, const RankedDoc& b) {
        if (a.x != b.x) return a.x > b.x;
        if (a.y != b.y) return a.y > b.y;
        return a.alias < b.alias;
    });
    return out;
}

// --- persistence -------------------------------------------------------------

void save_t2_jsonl(const ServerScoreTable& t2, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw ConfigError("cannot write T2: " + file.string());
    std::vector<CtId> ids;
    ids.reserve(t2.ct_by_id.size());
    for (const auto& [id, _] : t2.ct_by_id) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (CtId id : ids) {
        out << json{{"id", id}, {"ct", he::ct_to_string(t2.ct_by_id.at(id))}}.dump() << '\n';
    }
}

ServerScoreTable load_t2_jsonl(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read T2: " + file.string());
    ServerScoreTable t2;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json row = json::parse(line);
        t2.ct_by_id.emplace(row.at("id").get<CtId>(),
                            he::ct_from_string(row.at("ct").get<std::string>()));
    }
    return t2;
}

void save_i1_jsonl(const SecureIndexI1& i1, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw ConfigError("cannot write I1: " + file.string());
    for (const auto& [concept_id, postings] : i1.entries) {
        json row;
        row["concept"] = concept_id;
        auto& arr = row["postings"] = json::array();
        for (const auto& p : postings)
            arr.push_back(json::array({p.alias, p.primary_ct, p.secondary_ct}));
        out << row.dump() << '\n';
    }
}

SecureIndexI1 load_i1_jsonl(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read I1: " + file.string());
    SecureIndexI1 i1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json row = json::parse(line);
        auto& postings = i1.entries[row.at("concept").get<onto::ConceptId>()];
        for (const auto& p : row.at("postings")) {
            postings.push_back(I1Posting{p.at(0).get<Alias>(), p.at(1).get<CtId>(),
                                         p.at(2).get<CtId>()});
        }
    }
    return i1;
}

void save_i2_jsonl(const AccessIndexI2& i2, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw ConfigError("cannot write I2: " + file.string());
    for (const auto& [user, postings] : i2.entries) {
        json row;
        row["user"] = user;
        auto& arr = row["postings"] = json::array();
        for (const auto& p : postings) arr.push_back(json::array({p.alias, p.access_ct}));
        out << row.dump() << '\n';
    }
}

AccessIndexI2 load_i2_jsonl(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read I2: " + file.string());
    AccessIndexI2 i2;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json row = json::parse(line);
        auto& postings = i2.entries[row.at("user").get<std::string>()];
        for (const auto& p : row.at("postings"))
            postings.push_back(I2Posting{p.at(0).get<Alias>(), p.at(1).get<CtId>()});
    }
    return i2;
}

void save_t1_sealed(const OwnerScoreTable& t1, const aead::Key& key,
                    const std::filesystem::path& file, Rng& rng) {
    json j;
    j["inv_max"] = t1.inv_max;
    auto& scores = j["scores"] = json::object();
    for (const auto& [score, ids] : t1.ids_by_score) scores[std::to_string(score)] = ids;
    aead::write_sealed_file(key, file, j.dump(), rng);
}

OwnerScoreTable load_t1_sealed(const aead::Key& key, const std::filesystem::path& file) {
    json j = json::parse(aead::read_sealed_file(key, file));
    OwnerScoreTable t1;
    t1.inv_max = j.at("inv_max").get<int>();
    for (const auto& [score, ids] : j.at("scores").items()) {
        t1.ids_by_score[static_cast<std::uint32_t>(std::stoul(score))] =
            ids.get<std::vector<CtId>>();
    }
    return t1;
}

void save_aliases_sealed(const AliasTable& aliases, const aead::Key& key,
                         const std::filesystem::path& file, Rng& rng) {
    json j = json::object();
    for (const auto& [doc_id, alias] : aliases.alias_of) j[doc_id] = alias;
    aead::write_sealed_file(key, file, j.dump(), rng);
}

AliasTable load_aliases_sealed(const aead::Key& key, const std::filesystem::path& file) {
    json j = json::parse(aead::read_sealed_file(key, file));
    AliasTable out;
    for (const auto& [doc_id, alias] : j.items()) {
        out.alias_of[doc_id] = alias.get<Alias>();
        out.id_of[alias.get<Alias>()] = doc_id;
    }
    return out;
}

} // namespace secidx::siis
