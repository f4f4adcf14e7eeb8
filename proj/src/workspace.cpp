#include "secidx/workspace.hpp"

#include "secidx/error.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <sstream>

namespace secidx::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + file.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::trunc | std::ios::binary);
    if (!out) throw ConfigError("cannot write " + file.string());
    out << text;
}

text::Stoplist stoplist_for(const Config& config) {
    if (config.stopwords_file.empty()) return {};
    return text::load_stoplist(config.stopwords_file);
}

he::PublicKey load_he_public(const fs::path& dir) {
    return he::public_key_from_json(read_text(dir / "he_public.json"));
}

he::SecretKey load_he_secret(const fs::path& dir) {
    return he::secret_key_from_json(read_text(dir / "he_secret.json"));
}

sknn::Params doc_params(const Config& config) {
    sknn::Params params;
    params.epsilon_max = config.epsilon_max;
    params.alpha_density = config.alpha_density;
    return params;
}

sknn::Params query_params(const Config& config, Rng& rng) {
    sknn::Params params = doc_params(config);
    params.r = rng.uniform(0.5, 2.0);
    params.t = rng.uniform(0.0, 1.0);
    return params;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::vector<oracle::WeightedConcept> trapdoor_as_oracle_query(const siis::Trapdoor& trapdoor) {
    std::vector<oracle::WeightedConcept> out;
    for (const auto& tc : trapdoor.concepts) {
        out.push_back(oracle::WeightedConcept{tc.concept_id, static_cast<double>(tc.cp),
                                              static_cast<double>(tc.cs)});
    }
    return out;
}

} // namespace

void save_config(const Config& c, const fs::path& file) {
    std::ostringstream out;
    out << "Inv_max=" << c.Inv_max << '\n'
        << "NC=" << c.NC << '\n'
        << "K=" << c.K << '\n'
        << "X=" << c.X << '\n'
        << "x_concepts=" << c.x_concepts << '\n'
        << "y_concepts=" << c.y_concepts << '\n'
        << "V=" << c.V << '\n'
        << "block_size=" << c.block_size << '\n'
        << "scramble_x=" << c.scramble_x << '\n'
        << "scramble_y=" << c.scramble_y << '\n'
        << "workers=" << c.workers << '\n'
        << "partitions=" << c.partitions << '\n'
        << "strategy=" << c.strategy << '\n'
        << "seed=" << c.seed << '\n'
        << "prime_bits=" << c.prime_bits << '\n'
        << "sknn_u=" << c.sknn_u << '\n'
        << "epsilon_max=" << c.epsilon_max << '\n'
        << "alpha_density=" << c.alpha_density << '\n'
        << "min_page_terms=" << c.min_page_terms << '\n'
        << "max_concepts_per_term=" << c.max_concepts_per_term << '\n'
        << "stopwords_file=" << c.stopwords_file << '\n'
        << "corpus_dir=" << c.corpus_dir << '\n'
        << "onto_corpus_dir=" << c.onto_corpus_dir << '\n'
        << "users_file=" << c.users_file << '\n';
    write_text(file, out.str());
}

Config load_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config: " + file.string());
    Config c;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("bad config line: " + line);
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        if (key == "Inv_max") c.Inv_max = std::stoi(value);
        else if (key == "NC") c.NC = std::stoull(value);
        else if (key == "K") c.K = std::stoi(value);
        else if (key == "X") c.X = std::stoull(value);
        else if (key == "x_concepts") c.x_concepts = std::stoull(value);
        else if (key == "y_concepts") c.y_concepts = std::stoull(value);
        else if (key == "V") c.V = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "block_size") c.block_size = std::stoull(value);
        else if (key == "scramble_x") c.scramble_x = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "scramble_y") c.scramble_y = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "workers") c.workers = std::stoull(value);
        else if (key == "partitions") c.partitions = std::stoull(value);
        else if (key == "strategy") c.strategy = value;
        else if (key == "seed") c.seed = std::stoull(value);
        else if (key == "prime_bits") c.prime_bits = static_cast<unsigned>(std::stoul(value));
        else if (key == "sknn_u") c.sknn_u = std::stoi(value);
        else if (key == "epsilon_max") c.epsilon_max = std::stod(value);
        else if (key == "alpha_density") c.alpha_density = std::stod(value);
        else if (key == "min_page_terms") c.min_page_terms = std::stoull(value);
        else if (key == "max_concepts_per_term") c.max_concepts_per_term = std::stoull(value);
        else if (key == "stopwords_file") c.stopwords_file = value;
        else if (key == "corpus_dir") c.corpus_dir = value;
        else if (key == "onto_corpus_dir") c.onto_corpus_dir = value;
        else if (key == "users_file") c.users_file = value;
        else throw ConfigError("unknown config key: " + key);
    }
    return c;
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "sse") return Scheme::sse;
    if (name == "siis") return Scheme::siis;
    throw ConfigError("unknown scheme: " + name + " (expected sse or siis)");
}

Workspace init(const fs::path& root, const Config& config, bool force) {
    if (fs::exists(root / "config.cfg") && !force)
        throw ConfigError("workspace already exists (use --force to overwrite): " + root.string());
    if (force && fs::exists(root)) fs::remove_all(root);
    Workspace ws{root, config};
    fs::create_directories(ws.owner_dir());
    fs::create_directories(ws.cloud_dir());
    fs::create_directories(ws.user_dir());
    save_config(config, ws.config_file());
    return ws;
}

Workspace open(const fs::path& root) {
    Workspace ws{root, load_config(root / "config.cfg")};
    if (!fs::is_directory(ws.cloud_dir()))
        throw ConfigError("not a workspace: " + root.string());
    return ws;
}

void keygen(Workspace& ws) {
    Rng rng(ws.config.seed);
    auto kp = he::keygen(ws.config.prime_bits, rng);
    write_text(ws.owner_dir() / "he_secret.json", he::to_json(kp.sk));
    write_text(ws.owner_dir() / "he_public.json", he::to_json(kp.pk));
    write_text(ws.user_dir() / "he_secret.json", he::to_json(kp.sk));
    write_text(ws.user_dir() / "he_public.json", he::to_json(kp.pk));
    write_text(ws.cloud_dir() / "he_public.json", he::to_json(kp.pk));

    auto at_rest = aead::random_key(rng);
    aead::save_key(at_rest, ws.owner_dir() / "at_rest.key");
    aead::save_key(at_rest, ws.user_dir() / "at_rest.key");
}

void build(Workspace& ws, Scheme scheme, const fs::path& corpus_dir,
           const fs::path& onto_corpus_dir, const std::optional<fs::path>& users_file) {
    Rng rng(ws.config.seed);
    auto stoplist = stoplist_for(ws.config);

    auto corpus = text::load_corpus_dir(corpus_dir);
    auto pages = text::load_corpus_dir(onto_corpus_dir);
    onto::BuildOptions onto_opts;
    onto_opts.min_page_terms = ws.config.min_page_terms;
    onto_opts.max_concepts_per_term = ws.config.max_concepts_per_term;
    auto onto = onto::build_onto(pages, stoplist, onto_opts);
    onto::save_jsonl(onto, ws.owner_dir() / "ontology.jsonl");
    onto::save_jsonl(onto, ws.user_dir() / "ontology.jsonl");

    ws.config.corpus_dir = corpus_dir.string();
    ws.config.onto_corpus_dir = onto_corpus_dir.string();
    if (users_file) ws.config.users_file = users_file->string();
    save_config(ws.config, ws.config_file());

    if (scheme == Scheme::sse) {
        auto key = sknn::keygen(static_cast<int>(onto.concept_count()), ws.config.sknn_u, rng);
        sknn::save_key(key, ws.owner_dir() / "sknn_key.json");
        sknn::save_key(key, ws.user_dir() / "sknn_key.json");

        auto index = sse::build_index(corpus, stoplist, onto, key, ws.config.X,
                                      doc_params(ws.config), rng);
        sse::save_index(index, ws.cloud_dir() / "sse_index.bin");

        std::ofstream sidecar(ws.owner_dir() / "sse_sidecar.jsonl", std::ios::trunc);
        for (const auto& row : index.sidecar) {
            json j;
            j["doc_id"] = row.doc_id;
            auto& arr = j["concepts"] = json::array();
            for (const auto& cw : row.concepts)
                arr.push_back(json::array({cw.concept_id, cw.score.primary, cw.score.secondary}));
            sidecar << j.dump() << '\n';
        }
        return;
    }

    // siis
    if (!users_file) throw ConfigError("siis build requires --users");
    auto users = load_users_file(*users_file);
    auto pk = load_he_public(ws.owner_dir());
    auto at_rest = aead::load_key(ws.owner_dir() / "at_rest.key");

    auto tables = siis::tabgen(pk, ws.config.Inv_max, ws.config.NC, ws.config.K, rng);
    siis::save_t1_sealed(tables.t1, at_rest, ws.owner_dir() / "t1.sealed", rng);
    siis::save_t2_jsonl(tables.t2, ws.cloud_dir() / "t2.jsonl");

    siis::BuildOptions opts;
    opts.K = ws.config.K;
    opts.concept_cap = ws.config.X;
    opts.inv_max = ws.config.Inv_max;
    auto built = siis::build_indexes(corpus, stoplist, onto, users, tables.t1, opts, rng);
    siis::save_i1_jsonl(built.i1, ws.cloud_dir() / "i1.jsonl");
    siis::save_i2_jsonl(built.i2, ws.cloud_dir() / "i2.jsonl");
    siis::save_aliases_sealed(built.aliases, at_rest, ws.owner_dir() / "aliases.sealed", rng);
    siis::save_aliases_sealed(built.aliases, at_rest, ws.user_dir() / "aliases.sealed", rng);

    std::vector<aph::DocInput> inputs;
    for (const auto& doc : corpus) {
        inputs.push_back(aph::DocInput{doc.id, built.aliases.alias_of.at(doc.id),
                                       {doc.body.begin(), doc.body.end()}});
    }
    aph::PrepareOptions aph_opts;
    aph_opts.block_size = ws.config.block_size;
    aph_opts.versions = ws.config.V;
    aph_opts.scramble_y = ws.config.scramble_y;
    auto prepared = aph::prepare(inputs, aph_opts, at_rest, rng);
    aph::save_store(prepared.store, ws.cloud_dir() / "blocks");
    aph::save_tables_sealed(prepared.tables, prepared.correspondence, at_rest,
                            ws.user_dir() / "aph_tables.sealed", rng);
}

SearchOutput search(Workspace& ws, Scheme scheme, const std::string& user_id, std::size_t k,
                    const std::vector<std::string>& query_terms, bool with_oracle) {
    Rng rng(ws.config.seed);
    auto stoplist = stoplist_for(ws.config);
    auto onto = onto::load_jsonl(ws.user_dir() / "ontology.jsonl");

    SearchOutput out;
    if (scheme == Scheme::sse) {
        auto key = sknn::load_key(ws.user_dir() / "sknn_key.json");
        auto trapdoor =
            sse::trapdoor(query_terms, stoplist, onto, key, ws.config.X, query_params(ws.config, rng), rng);
        auto index = sse::load_index(ws.cloud_dir() / "sse_index.bin");
        for (const auto& hit : sse::search(index, trapdoor, k))
            out.hits.push_back(SearchHit{hit.doc_id, hit.primary, hit.secondary});
        if (with_oracle) {
            auto corpus = text::load_corpus_dir(ws.config.corpus_dir);
            oracle::Options opts;
            opts.concept_cap = ws.config.X;
            for (const auto& hit : oracle::concept_search(corpus, stoplist, onto, query_terms, k, opts))
                out.oracle_hits.push_back(SearchHit{hit.doc_id, hit.primary, hit.secondary});
        }
        return out;
    }

    auto trapdoor = siis::trapdoor(query_terms, stoplist, onto, ws.config.x_concepts,
                                   ws.config.y_concepts, ws.config.Inv_max, rng);
    auto i1 = siis::load_i1_jsonl(ws.cloud_dir() / "i1.jsonl");
    auto i2 = siis::load_i2_jsonl(ws.cloud_dir() / "i2.jsonl");
    auto t2 = siis::load_t2_jsonl(ws.cloud_dir() / "t2.jsonl");
    auto pk = load_he_public(ws.cloud_dir());
    auto result = siis::search(i1, i2, t2, pk, trapdoor, user_id, k, ws.config.Inv_max);

    auto sk = load_he_secret(ws.user_dir());
    auto at_rest = aead::load_key(ws.user_dir() / "at_rest.key");
    auto aliases = siis::load_aliases_sealed(at_rest, ws.user_dir() / "aliases.sealed");
    for (const auto& doc : siis::client_sort(result, sk, pk)) {
        out.hits.push_back(SearchHit{aliases.id_of.at(doc.alias), static_cast<double>(doc.x),
                                     static_cast<double>(doc.y)});
    }
    if (with_oracle) {
        auto corpus = text::load_corpus_dir(ws.config.corpus_dir);
        auto users = load_users_file(ws.config.users_file);
        auto it = users.find(user_id);
        if (it == users.end()) throw NotFoundError("unknown user: " + user_id);
        oracle::Options opts;
        opts.concept_cap = ws.config.X;
        opts.quantize_inv_max = ws.config.Inv_max;
        opts.query_concepts = trapdoor_as_oracle_query(trapdoor);
        opts.accessible = it->second;
        opts.drop_zero_primary = true;
        for (const auto& hit : oracle::concept_search(corpus, stoplist, onto, query_terms, k, opts))
            out.oracle_hits.push_back(SearchHit{hit.doc_id, hit.primary, hit.secondary});
    }
    return out;
}

std::vector<fs::path> fetch(Workspace& ws, const std::vector<std::string>& doc_ids) {
    Rng rng(ws.config.seed);
    auto at_rest = aead::load_key(ws.user_dir() / "at_rest.key");
    auto aliases = siis::load_aliases_sealed(at_rest, ws.user_dir() / "aliases.sealed");
    aph::BlockTables tables;
    aph::CorrespondenceTable correspondence;
    aph::load_tables_sealed(at_rest, ws.user_dir() / "aph_tables.sealed", tables, correspondence);

    fs::create_directories(ws.user_dir() / "fetched");
    fs::create_directories(ws.user_dir() / "requests");
    std::vector<fs::path> written;
    for (const auto& doc_id : doc_ids) {
        auto it = aliases.alias_of.find(doc_id);
        if (it == aliases.alias_of.end()) throw NotFoundError("unknown doc id: " + doc_id);
        auto plan = aph::build_fetch(it->second, tables, ws.config.scramble_x,
                                     ws.config.scramble_y, rng);

        // the simulated wire exchange: a request file of version ids goes
        // out, the matching blobs come back as a response directory
        auto request = plan.request();
        std::ostringstream tag;
        tag << "fetch_" << std::hex << rng.next_u64();
        write_text(ws.user_dir() / "requests" / (tag.str() + ".json"),
                   nlohmann::json{{"versions", request}}.dump());
        auto blobs = aph::load_blobs(ws.cloud_dir() / "blocks", request);
        fs::path response_dir = ws.user_dir() / "responses" / tag.str();
        fs::create_directories(response_dir);
        for (const auto& [vid, blob] : blobs) {
            std::ofstream out(response_dir / (std::to_string(vid) + ".blk"),
                              std::ios::trunc | std::ios::binary);
            out.write(reinterpret_cast<const char*>(blob.data()),
                      static_cast<std::streamsize>(blob.size()));
        }

        auto received = aph::load_blobs(response_dir, request);
        auto bytes = aph::reconstruct(plan, received, at_rest);
        fs::path out = ws.user_dir() / "fetched" / (doc_id + ".txt");
        write_text(out, std::string(bytes.begin(), bytes.end()));
        written.push_back(out);
    }
    return written;
}

std::string bench_csv_header() {
    return "strategy,workers,partitions,docs,queries,wall_ms";
}

std::string to_csv(const BenchRow& row) {
    std::ostringstream out;
    out << row.strategy << ',' << row.workers << ',' << row.partitions << ',' << row.docs << ','
        << row.queries << ',' << row.wall_ms;
    return out.str();
}

BenchRow bench(std::size_t docs, std::size_t queries, std::size_t workers,
               par::Strategy strategy, std::size_t partitions, std::size_t k,
               std::uint64_t seed) {
    Rng rng(seed);
    const std::uint32_t concept_dim = 20;
    const std::uint32_t dummy_dims = 3;
    const Eigen::Index dim = concept_dim + dummy_dims + 1;

    auto random_vec = [&] {
        Eigen::VectorXd v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.uniform(-1.0, 1.0);
        return v;
    };

    sse::VectorModelIndex index;
    index.concept_dim = concept_dim;
    index.dummy_dims = dummy_dims;
    for (std::size_t d = 0; d < docs; ++d) {
        index.rows.push_back(sse::IndexRow{"doc" + std::to_string(d),
                                           {random_vec(), random_vec()},
                                           {random_vec(), random_vec()}});
    }
    par::QueryBatch batch;
    for (std::size_t q = 0; q < queries; ++q)
        batch.push_back(sse::Trapdoor{{random_vec(), random_vec()}, {random_vec(), random_vec()}});

    par::BatchOptions options;
    options.k = k;
    options.strategy = strategy;
    options.workers = workers;
    options.partitions = partitions;

    auto begin = std::chrono::steady_clock::now();
    auto results = par::batch_search(index, batch, options);
    auto end = std::chrono::steady_clock::now();

    BenchRow row;
    row.strategy = strategy == par::Strategy::shared ? "shared" : "partitioned";
    row.workers = workers;
    row.partitions = partitions;
    row.docs = docs;
    row.queries = results.size();
    row.wall_ms = std::chrono::duration<double, std::milli>(end - begin).count();
    return row;
}

std::vector<EvalRow> eval(Workspace& ws, Scheme scheme, const std::string& user_id,
                          std::size_t k, const fs::path& queries_file,
                          const fs::path& qrels_file) {
    std::ifstream qin(queries_file);
    if (!qin) throw ConfigError("cannot read queries: " + queries_file.string());
    std::vector<std::pair<std::string, std::vector<std::string>>> queries;
    std::string line;
    while (std::getline(qin, line)) {
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw ConfigError("malformed queries line: " + line);
        queries.emplace_back(line.substr(0, tab), split_ws(line.substr(tab + 1)));
    }

    std::ifstream rin(qrels_file);
    if (!rin) throw ConfigError("cannot read qrels: " + qrels_file.string());
    std::map<std::string, std::set<std::string>> qrels;
    while (std::getline(rin, line)) {
        if (line.empty()) continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos) throw ConfigError("malformed qrels line: " + line);
        qrels[line.substr(0, tab)].insert(line.substr(tab + 1));
    }

    std::vector<EvalRow> rows;
    for (const auto& [query_id, terms] : queries) {
        auto output = search(ws, scheme, user_id, k, terms);
        std::set<std::string> returned;
        for (const auto& hit : output.hits) returned.insert(hit.doc_id);
        auto relevant = qrels.contains(query_id) ? qrels.at(query_id) : std::set<std::string>{};
        auto metrics = text::eval_metrics(returned, relevant);
        rows.push_back(EvalRow{query_id, metrics.accuracy, metrics.recall});
    }
    return rows;
}

std::vector<std::string> leak_check(const Workspace& ws) {
    std::vector<std::string> violations;
    const fs::path cloud = ws.cloud_dir();
    if (!fs::is_directory(cloud)) return {"cloud directory missing"};

    for (const auto& entry : fs::recursive_directory_iterator(cloud)) {
        fs::path rel = fs::relative(entry.path(), cloud);
        if (entry.is_directory()) {
            if (rel == "blocks") continue;
            violations.push_back("unexpected directory in cloud: " + rel.string());
            continue;
        }
        std::string name = rel.string();
        bool allowed = name == "he_public.json" || name == "sse_index.bin" ||
                       name == "t2.jsonl" || name == "i1.jsonl" || name == "i2.jsonl" ||
                       (rel.begin()->string() == "blocks" && rel.extension() == ".blk");
        if (!allowed) violations.push_back("unexpected file in cloud: " + name);
    }
    return violations;
}

std::map<std::string, std::set<std::string>> load_users_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read users file: " + file.string());
    std::map<std::string, std::set<std::string>> users;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw ConfigError("malformed users line (expected user<TAB>doc): " + line);
        users[line.substr(0, tab)].insert(line.substr(tab + 1));
    }
    return users;
}

} // namespace secidx::cli
