#include "secidx/aph.hpp"
#include "secidx/error.hpp"
#include "secidx/oracle.hpp"
#include "secidx/paillier.hpp"
#include "secidx/parsearch.hpp"
#include "secidx/siis.hpp"
#include "secidx/sse.hpp"
#include "secidx/workspace.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace secidx;

namespace {

mpz_class to_mpz(const py::int_& value) {
    return mpz_class(py::str(value).cast<std::string>());
}

py::int_ to_pyint(const mpz_class& value) {
    return py::reinterpret_steal<py::int_>(
        PyLong_FromString(value.get_str().c_str(), nullptr, 10));
}

Eigen::VectorXd to_vec(const std::vector<double>& values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
    return v;
}

text::Collection to_collection(const std::vector<std::pair<std::string, std::string>>& docs) {
    text::Collection out;
    for (const auto& [id, body] : docs) out.push_back({id, body});
    return out;
}

text::Stoplist to_stoplist(const std::vector<std::string>& words) {
    return {words.begin(), words.end()};
}

} // namespace

PYBIND11_MODULE(secidx, m) {
    m.doc() = "searchable-encryption engine: encrypted indexes, ranked concept search, "
              "access rights, hidden document fetch";

    py::register_exception<Error>(m, "SecidxError");

    py::class_<Rng>(m, "Rng").def(py::init<std::uint64_t>(), py::arg("seed"));

    // --- score encryption -----------------------------------------------
    py::class_<he::PublicKey>(m, "HePublicKey")
        .def_property_readonly("n", [](const he::PublicKey& pk) { return to_pyint(pk.n); })
        .def("to_json", [](const he::PublicKey& pk) { return he::to_json(pk); });
    py::class_<he::SecretKey>(m, "HeSecretKey")
        .def("to_json", [](const he::SecretKey& sk) { return he::to_json(sk); });
    py::class_<he::KeyPair>(m, "HeKeyPair")
        .def_readonly("pk", &he::KeyPair::pk)
        .def_readonly("sk", &he::KeyPair::sk);
    py::class_<he::Ciphertext>(m, "HeCiphertext")
        .def("__str__", [](const he::Ciphertext& c) { return he::ct_to_string(c); });

    m.def("he_keygen", &he::keygen, py::arg("prime_bits"), py::arg("rng"));
    m.def("he_enc", [](const he::PublicKey& pk, const py::int_& message, Rng& rng) {
        return he::enc(pk, to_mpz(message), rng);
    });
    m.def("he_dec", [](const he::SecretKey& sk, const he::PublicKey& pk, const he::Ciphertext& c) {
        return to_pyint(he::dec(sk, pk, c));
    });
    m.def("he_add", &he::add);
    m.def("he_mul_plain", [](const he::PublicKey& pk, const he::Ciphertext& c, const py::int_& k) {
        return he::mul_plain(pk, c, to_mpz(k));
    });

    // --- text pipeline ----------------------------------------------------
    m.def("tokenize", [](const std::string& input) { return text::tokenize(input); });
    m.def("stem", &text::stem);
    m.def("drop_stopwords", [](const std::vector<std::string>& terms,
                               const std::vector<std::string>& stoplist) {
        return text::drop_stopwords(terms, to_stoplist(stoplist));
    });
    m.def("tfidf", [](const std::vector<std::pair<std::string, std::string>>& docs,
                      const std::vector<std::string>& stoplist) {
        std::map<std::string, std::map<std::string, double>> out;
        for (auto& [doc, vec] : text::tfidf(to_collection(docs), to_stoplist(stoplist)))
            out[doc] = {vec.begin(), vec.end()};
        return out;
    });
    m.def("eval_metrics", [](const std::set<std::string>& returned,
                             const std::set<std::string>& relevant) {
        auto metrics = text::eval_metrics(returned, relevant);
        return std::make_pair(metrics.accuracy, metrics.recall);
    });

    // --- ontology ----------------------------------------------------------
    py::class_<onto::Ontology>(m, "Ontology")
        .def_property_readonly("concept_count", &onto::Ontology::concept_count)
        .def_readonly("concept_titles", &onto::Ontology::concept_titles);
    m.def("build_onto",
          [](const std::vector<std::pair<std::string, std::string>>& pages,
             const std::vector<std::string>& stoplist, std::size_t min_page_terms,
             std::size_t max_concepts_per_term) {
              onto::BuildOptions options;
              options.min_page_terms = min_page_terms;
              options.max_concepts_per_term = max_concepts_per_term;
              return onto::build_onto(to_collection(pages), to_stoplist(stoplist), options);
          },
          py::arg("pages"), py::arg("stoplist") = std::vector<std::string>{},
          py::arg("min_page_terms") = 100, py::arg("max_concepts_per_term") = 5000);
    m.def("concept_weights",
          [](const std::map<std::string, double>& term_vec, const onto::Ontology& onto,
             std::size_t cap) {
              std::vector<std::tuple<onto::ConceptId, std::uint32_t, double>> out;
              text::TermVector vec(term_vec.begin(), term_vec.end());
              for (const auto& cw : onto::concept_weights(vec, onto, cap))
                  out.emplace_back(cw.concept_id, cw.score.primary, cw.score.secondary);
              return out;
          });
    m.def("double_score_greater",
          [](std::uint32_t p1, double s1, std::uint32_t p2, double s2) {
              return onto::double_score_greater({p1, s1}, {p2, s2});
          });

    // --- vector encryption --------------------------------------------------
    py::class_<sknn::Key>(m, "SknnKey")
        .def_property_readonly("dim", &sknn::Key::dim)
        .def_readonly("m", &sknn::Key::m)
        .def_readonly("u", &sknn::Key::u);
    py::class_<sknn::Params>(m, "SknnParams")
        .def(py::init([](double r, double t, double epsilon_max, double alpha_density) {
                 return sknn::Params{r, t, epsilon_max, alpha_density};
             }),
             py::arg("r") = 1.0, py::arg("t") = 0.0, py::arg("epsilon_max") = 0.01,
             py::arg("alpha_density") = 0.5);
    py::class_<sknn::EncryptedDoc>(m, "EncryptedDoc");
    py::class_<sknn::EncryptedQuery>(m, "EncryptedQuery");
    m.def("sknn_keygen", &sknn::keygen, py::arg("m"), py::arg("u"), py::arg("rng"));
    m.def("sknn_enc_doc", [](const sknn::Key& key, const std::vector<double>& d,
                             const sknn::Params& params, Rng& rng) {
        return sknn::enc_doc(key, to_vec(d), params, rng);
    });
    m.def("sknn_enc_query", [](const sknn::Key& key, const std::vector<double>& q,
                               const sknn::Params& params, Rng& rng) {
        return sknn::enc_query(key, to_vec(q), params, rng);
    });
    m.def("sknn_eval", &sknn::eval);

    // --- vector-model scheme -------------------------------------------------
    py::class_<sse::VectorModelIndex>(m, "VectorIndex")
        .def_property_readonly("rows",
                               [](const sse::VectorModelIndex& i) { return i.rows.size(); });
    py::class_<sse::Trapdoor>(m, "VectorTrapdoor");
    m.def("sse_build_index",
          [](const std::vector<std::pair<std::string, std::string>>& docs,
             const std::vector<std::string>& stoplist, const onto::Ontology& onto,
             const sknn::Key& key, std::size_t concept_cap, const sknn::Params& params,
             Rng& rng) {
              return sse::build_index(to_collection(docs), to_stoplist(stoplist), onto, key,
                                      concept_cap, params, rng);
          });
    m.def("sse_trapdoor",
          [](const std::vector<std::string>& query, const std::vector<std::string>& stoplist,
             const onto::Ontology& onto, const sknn::Key& key, std::size_t concept_cap,
             const sknn::Params& params, Rng& rng) {
              return sse::trapdoor(query, to_stoplist(stoplist), onto, key, concept_cap, params,
                                   rng);
          });
    m.def("sse_search", [](const sse::VectorModelIndex& index, const sse::Trapdoor& trapdoor,
                           std::size_t k) {
        std::vector<std::tuple<std::string, double, double>> out;
        for (const auto& hit : sse::search(index, trapdoor, k))
            out.emplace_back(hit.doc_id, hit.primary, hit.secondary);
        return out;
    });
    m.def("batch_search",
          [](const sse::VectorModelIndex& index, const std::vector<sse::Trapdoor>& batch,
             std::size_t k, const std::string& strategy, std::size_t workers,
             std::size_t partitions) {
              par::BatchOptions options;
              options.k = k;
              options.strategy = strategy == "partitioned" ? par::Strategy::partitioned
                                                           : par::Strategy::shared;
              options.workers = workers;
              options.partitions = partitions;
              std::vector<std::vector<std::tuple<std::string, double, double>>> out;
              for (const auto& list : par::batch_search(index, batch, options)) {
                  std::vector<std::tuple<std::string, double, double>> converted;
                  for (const auto& hit : list)
                      converted.emplace_back(hit.doc_id, hit.primary, hit.secondary);
                  out.push_back(std::move(converted));
              }
              return out;
          },
          py::arg("index"), py::arg("batch"), py::arg("k") = 10, py::arg("strategy") = "shared",
          py::arg("workers") = 1, py::arg("partitions") = 1);

    // --- inverted-index scheme -------------------------------------------------
    py::class_<siis::TabGenResult>(m, "SiisTables")
        .def_property_readonly("total_ciphertexts", [](const siis::TabGenResult& t) {
            return t.t2.ct_by_id.size();
        });
    py::class_<siis::BuildResult>(m, "SiisIndexes")
        .def_property_readonly("aliases", [](const siis::BuildResult& b) {
            return b.aliases.alias_of;
        });
    py::class_<siis::Trapdoor>(m, "SiisTrapdoor")
        .def_property_readonly("concepts", [](const siis::Trapdoor& t) {
            std::vector<std::tuple<onto::ConceptId, std::uint32_t, std::uint32_t>> out;
            for (const auto& tc : t.concepts) out.emplace_back(tc.concept_id, tc.cp, tc.cs);
            return out;
        });
    m.def("siis_tabgen", [](const he::PublicKey& pk, int inv_max, std::uint64_t nc, int K,
                            Rng& rng) { return siis::tabgen(pk, inv_max, nc, K, rng); });
    m.def("siis_build_indexes",
          [](const std::vector<std::pair<std::string, std::string>>& docs,
             const std::vector<std::string>& stoplist, const onto::Ontology& onto,
             const std::map<std::string, std::set<std::string>>& users,
             const siis::TabGenResult& tables, int K, std::size_t concept_cap, int inv_max,
             Rng& rng) {
              siis::BuildOptions options;
              options.K = K;
              options.concept_cap = concept_cap;
              options.inv_max = inv_max;
              return siis::build_indexes(to_collection(docs), to_stoplist(stoplist), onto, users,
                                         tables.t1, options, rng);
          });
    m.def("siis_trapdoor",
          [](const std::vector<std::string>& query, const std::vector<std::string>& stoplist,
             const onto::Ontology& onto, std::size_t x, std::size_t y, int inv_max, Rng& rng) {
              return siis::trapdoor(query, to_stoplist(stoplist), onto, x, y, inv_max, rng);
          });
    m.def("siis_search_and_sort",
          [](const siis::BuildResult& built, const siis::TabGenResult& tables,
             const he::KeyPair& keys, const siis::Trapdoor& trapdoor, const std::string& user,
             std::size_t k) {
              auto result =
                  siis::search(built.i1, built.i2, tables.t2, keys.pk, trapdoor, user, k);
              std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t>> out;
              for (const auto& doc : siis::client_sort(result, keys.sk, keys.pk))
                  out.emplace_back(built.aliases.id_of.at(doc.alias), doc.x, doc.y);
              return out;
          });

    // --- hidden block fetch -------------------------------------------------
    py::class_<aead::Key>(m, "AeadKey");
    m.def("aead_random_key", &aead::random_key);
    py::class_<aph::PrepareResult>(m, "AphPrepared")
        .def_property_readonly("blocks", [](const aph::PrepareResult& p) {
            return p.store.blobs.size();
        });
    m.def("aph_prepare",
          [](const std::vector<std::tuple<std::string, std::uint64_t, py::bytes>>& docs,
             std::size_t block_size, std::uint32_t versions, std::uint32_t scramble_y,
             const aead::Key& key, Rng& rng) {
              std::vector<aph::DocInput> inputs;
              for (const auto& [data_id, alias, data] : docs) {
                  auto view = static_cast<std::string>(data);
                  inputs.push_back(aph::DocInput{data_id, alias, {view.begin(), view.end()}});
              }
              aph::PrepareOptions options;
              options.block_size = block_size;
              options.versions = versions;
              options.scramble_y = scramble_y;
              return aph::prepare(inputs, options, key, rng);
          });
    m.def("aph_theta1", [](const aph::PrepareResult& prepared, std::uint64_t alias) {
        return aph::theta1(prepared.tables, alias);
    });
    m.def("aph_fetch_roundtrip",
          [](const aph::PrepareResult& prepared, std::uint64_t alias, std::uint32_t x,
             std::uint32_t y, const aead::Key& key, Rng& rng) {
              auto plan = aph::build_fetch(alias, prepared.tables, x, y, rng);
              auto blobs = aph::serve_fetch(prepared.store, plan.request());
              auto bytes = aph::reconstruct(plan, blobs, key);
              return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
          });

    // --- plaintext reference -------------------------------------------------
    m.def("oracle_concept_search",
          [](const std::vector<std::pair<std::string, std::string>>& docs,
             const std::vector<std::string>& stoplist, const onto::Ontology& onto,
             const std::vector<std::string>& query, std::size_t k, std::size_t concept_cap) {
              oracle::Options options;
              options.concept_cap = concept_cap;
              std::vector<std::tuple<std::string, double, double>> out;
              for (const auto& hit : oracle::concept_search(to_collection(docs),
                                                            to_stoplist(stoplist), onto, query,
                                                            k, options))
                  out.emplace_back(hit.doc_id, hit.primary, hit.secondary);
              return out;
          },
          py::arg("docs"), py::arg("stoplist"), py::arg("onto"), py::arg("query"),
          py::arg("k") = 10, py::arg("concept_cap") = 20);
}
