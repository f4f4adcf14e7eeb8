#include "secidx/sse.hpp"

#include "secidx/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace secidx::sse {
namespace {

using nlohmann::json;

constexpr char kBinaryMagic[8] = {'S', 'E', 'C', 'I', 'D', 'X', 'B', '1'};
constexpr char kTrapdoorMagic[8] = {'S', 'E', 'C', 'T', 'R', 'P', 'B', '1'};

void check_key(const sknn::Key& key, const onto::Ontology& onto) {
    if (key.m != static_cast<int>(onto.concept_count()))
        throw DomainError("sse: key dimension does not match concept count");
}

// Concept vector split into dense per-level vectors over the concept space.
void densify(const onto::ConceptVector& concepts, std::uint32_t n,
             Eigen::VectorXd& primary, Eigen::VectorXd& secondary) {
    primary = Eigen::VectorXd::Zero(n);
    secondary = Eigen::VectorXd::Zero(n);
    for (const auto& cw : concepts) {
        primary(cw.concept_id) = static_cast<double>(cw.score.primary);
        secondary(cw.concept_id) = cw.score.secondary;
    }
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void write_vec(std::ostream& out, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double d = v(i);
        std::uint64_t bits;
        std::memcpy(&bits, &d, 8);
        write_u64(out, bits);
    }
}

Eigen::VectorXd read_vec(std::istream& in, std::uint32_t dim) {
    Eigen::VectorXd v(dim);
    for (std::uint32_t i = 0; i < dim; ++i) {
        std::uint64_t bits = read_u64(in);
        double d;
        std::memcpy(&d, &bits, 8);
        v(i) = d;
    }
    return v;
}

json vec_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Eigen::VectorXd vec_from_json(const json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    return v;
}

} // namespace

VectorModelIndex build_index(const text::Collection& collection, const text::Stoplist& stoplist,
                             const onto::Ontology& onto, const sknn::Key& key,
                             std::size_t concept_cap, const sknn::Params& params, Rng& rng) {
    if (collection.empty()) throw DomainError("sse build_index: empty collection");
    check_key(key, onto);

    VectorModelIndex index;
    index.concept_dim = static_cast<std::uint32_t>(onto.concept_count());
    index.dummy_dims = static_cast<std::uint32_t>(key.u);

    auto vectors = text::tfidf(collection, stoplist);
    for (const auto& doc : collection) {
        auto concepts = onto::concept_weights(vectors.at(doc.id), onto, concept_cap);
        Eigen::VectorXd primary, secondary;
        densify(concepts, index.concept_dim, primary, secondary);
        index.rows.push_back(IndexRow{doc.id, sknn::enc_doc(key, primary, params, rng),
                                      sknn::enc_doc(key, secondary, params, rng)});
        index.sidecar.push_back(OracleRow{doc.id, std::move(concepts)});
    }
    return index;
}

Trapdoor trapdoor(const std::vector<std::string>& query_terms, const text::Stoplist& stoplist,
                  const onto::Ontology& onto, const sknn::Key& key, std::size_t concept_cap,
                  const sknn::Params& params, Rng& rng) {
    if (query_terms.empty()) throw DomainError("sse trapdoor: empty query");
    check_key(key, onto);

    text::TermVector binary;
    for (const auto& raw : query_terms)
        for (const auto& term : text::process(raw, stoplist)) binary[term] = 1.0;

    auto concepts = onto::concept_weights(binary, onto, concept_cap);
    if (concepts.empty()) throw DomainError("sse trapdoor: no query term maps to any concept");

    Eigen::VectorXd primary, secondary;
    densify(concepts, static_cast<std::uint32_t>(onto.concept_count()), primary, secondary);
    return Trapdoor{sknn::enc_query(key, primary, params, rng),
                    sknn::enc_query(key, secondary, params, rng)};
}

std::int64_t score_key(double score) {
    return std::llround(score * 1e6);
}

bool ranks_before(const ScoredDoc& a, const ScoredDoc& b) {
    auto pa = score_key(a.primary), pb = score_key(b.primary);
    if (pa != pb) return pa > pb;
    auto sa = score_key(a.secondary), sb = score_key(b.secondary);
    if (sa != sb) return sa > sb;
    return a.doc_id < b.doc_id;
}

std::vector<ScoredDoc> search(const VectorModelIndex& index, const Trapdoor& trapdoor,
                              std::size_t k) {
    if (k < 1) throw DomainError("sse search: k must be >= 1");
    std::size_t dim = index.concept_dim + index.dummy_dims + 1;
    if (static_cast<std::size_t>(trapdoor.primary.a.size()) != dim)
        throw KeyMismatchError("sse search: trapdoor dimension does not match index");

    std::vector<ScoredDoc> scored;
    scored.reserve(index.rows.size());
    for (const auto& row : index.rows) {
        scored.push_back(ScoredDoc{row.doc_id, sknn::eval(row.primary, trapdoor.primary),
                                   sknn::eval(row.secondary, trapdoor.secondary)});
    }
    std::sort(scored.begin(), scored.end(), ranks_before);
    if (scored.size() > k) scored.resize(k);
    return scored;
}

void save_index(const VectorModelIndex& index, const std::filesystem::path& file,
                FileFormat format) {
    std::ofstream out(file, std::ios::trunc | std::ios::binary);
    if (!out) throw ConfigError("cannot write index: " + file.string());
    if (format == FileFormat::binary) {
        out.write(kBinaryMagic, 8);
        write_u32(out, index.concept_dim);
        write_u32(out, index.dummy_dims);
        write_u64(out, index.rows.size());
        for (const auto& row : index.rows) {
            write_u32(out, static_cast<std::uint32_t>(row.doc_id.size()));
            out.write(row.doc_id.data(), static_cast<std::streamsize>(row.doc_id.size()));
            write_vec(out, row.primary.a);
            write_vec(out, row.primary.b);
            write_vec(out, row.secondary.a);
            write_vec(out, row.secondary.b);
        }
    } else {
        json j;
        j["format"] = "secidx-index-json-1";
        j["n"] = index.concept_dim;
        j["u"] = index.dummy_dims;
        auto& rows = j["rows"] = json::array();
        for (const auto& row : index.rows) {
            rows.push_back(json{{"doc_id", row.doc_id},
                                {"pa", vec_to_json(row.primary.a)},
                                {"pb", vec_to_json(row.primary.b)},
                                {"sa", vec_to_json(row.secondary.a)},
                                {"sb", vec_to_json(row.secondary.b)}});
        }
        out << j.dump();
    }
}

VectorModelIndex load_index(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot read index: " + file.string());
    char magic[8] = {};
    in.read(magic, 8);
    VectorModelIndex index;
    if (std::memcmp(magic, kBinaryMagic, 8) == 0) {
        index.concept_dim = read_u32(in);
        index.dummy_dims = read_u32(in);
        std::uint64_t count = read_u64(in);
        std::uint32_t dim = index.concept_dim + index.dummy_dims + 1;
        for (std::uint64_t i = 0; i < count; ++i) {
            IndexRow row;
            std::uint32_t len = read_u32(in);
            row.doc_id.resize(len);
            in.read(row.doc_id.data(), len);
            row.primary.a = read_vec(in, dim);
            row.primary.b = read_vec(in, dim);
            row.secondary.a = read_vec(in, dim);
            row.secondary.b = read_vec(in, dim);
            if (!in) throw ConfigError("truncated index file: " + file.string());
            index.rows.push_back(std::move(row));
        }
        return index;
    }
    in.seekg(0);
    json j = json::parse(in);
    if (j.at("format").get<std::string>() != "secidx-index-json-1")
        throw ConfigError("unknown index format: " + file.string());
    index.concept_dim = j.at("n").get<std::uint32_t>();
    index.dummy_dims = j.at("u").get<std::uint32_t>();
    for (const auto& row : j.at("rows")) {
        index.rows.push_back(IndexRow{row.at("doc_id").get<std::string>(),
                                      {vec_from_json(row.at("pa")), vec_from_json(row.at("pb"))},
                                      {vec_from_json(row.at("sa")), vec_from_json(row.at("sb"))}});
    }
    return index;
}

void save_trapdoor(const Trapdoor& trapdoor, const std::filesystem::path& file,
                   FileFormat format) {
    std::ofstream out(file, std::ios::trunc | std::ios::binary);
    if (!out) throw ConfigError("cannot write trapdoor: " + file.string());
    if (format == FileFormat::binary) {
        out.write(kTrapdoorMagic, 8);
        write_u32(out, static_cast<std::uint32_t>(trapdoor.primary.a.size()));
        write_vec(out, trapdoor.primary.a);
        write_vec(out, trapdoor.primary.b);
        write_vec(out, trapdoor.secondary.a);
        write_vec(out, trapdoor.secondary.b);
    } else {
        json j;
        j["format"] = "secidx-trapdoor-json-1";
        j["pa"] = vec_to_json(trapdoor.primary.a);
        j["pb"] = vec_to_json(trapdoor.primary.b);
        j["sa"] = vec_to_json(trapdoor.secondary.a);
        j["sb"] = vec_to_json(trapdoor.secondary.b);
        out << j.dump();
    }
}

Trapdoor load_trapdoor(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot read trapdoor: " + file.string());
    char magic[8] = {};
    in.read(magic, 8);
    if (std::memcmp(magic, kTrapdoorMagic, 8) == 0) {
        std::uint32_t dim = read_u32(in);
        Trapdoor t;
        t.primary.a = read_vec(in, dim);
        t.primary.b = read_vec(in, dim);
        t.secondary.a = read_vec(in, dim);
        t.secondary.b = read_vec(in, dim);
        if (!in) throw ConfigError("truncated trapdoor file: " + file.string());
        return t;
    }
    in.seekg(0);
    json j = json::parse(in);
    if (j.at("format").get<std::string>() != "secidx-trapdoor-json-1")
        throw ConfigError("unknown trapdoor format: " + file.string());
    Trapdoor t;
    t.primary.a = vec_from_json(j.at("pa"));
    t.primary.b = vec_from_json(j.at("pb"));
    t.secondary.a = vec_from_json(j.at("sa"));
    t.secondary.b = vec_from_json(j.at("sb"));
    return t;
}

} // namespace secidx::sse
