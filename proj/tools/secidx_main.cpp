#include "secidx/error.hpp"
#include "secidx/workspace.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace secidx;

void add_config_flags(CLI::App* cmd, cli::Config& config) {
    cmd->add_option("--Inv_max", config.Inv_max, "score interval upper bound");
    cmd->add_option("--NC", config.NC, "ciphertexts per nonzero score");
    cmd->add_option("--K", config.K, "dummy-volume security parameter [1,10]");
    cmd->add_option("--X", config.X, "concepts kept per document/query");
    cmd->add_option("--x_concepts", config.x_concepts, "concepts sampled into a trapdoor");
    cmd->add_option("--y_concepts", config.y_concepts, "top concepts sampled from");
    cmd->add_option("--V", config.V, "encrypted versions per block");
    cmd->add_option("--block_size", config.block_size, "block size in bytes");
    cmd->add_option("--scramble_x", config.scramble_x, "dummy interval lower bound (exclusive)");
    cmd->add_option("--scramble_y", config.scramble_y, "dummy interval upper bound (inclusive)");
    cmd->add_option("--workers", config.workers, "worker threads");
    cmd->add_option("--partitions", config.partitions, "index partitions");
    cmd->add_option("--strategy", config.strategy, "shared or partitioned");
    cmd->add_option("--seed", config.seed, "randomness seed");
    cmd->add_option("--prime_bits", config.prime_bits, "prime size for score encryption keys");
    cmd->add_option("--sknn_u", config.sknn_u, "dummy dimensions in vector encryption");
    cmd->add_option("--epsilon_max", config.epsilon_max, "document noise bound");
    cmd->add_option("--alpha_density", config.alpha_density, "query dummy-dimension density");
    cmd->add_option("--min_page_terms", config.min_page_terms, "minimum tokens per concept page");
    cmd->add_option("--max_concepts_per_term", config.max_concepts_per_term,
                    "cap on concepts per ontology term");
    cmd->add_option("--stopwords", config.stopwords_file, "stop list file");
}

void print_hits(const std::vector<cli::SearchHit>& hits) {
    for (std::size_t i = 0; i < hits.size(); ++i) {
        std::cout << (i + 1) << '\t' << hits[i].doc_id << '\t' << hits[i].primary << '\t'
                  << hits[i].secondary << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"searchable-encryption engine: encrypted indexes, ranked concept search, "
                 "access rights and hidden document fetch"};
    app.require_subcommand(1);

    std::string root = "workspace";
    std::string scheme_name = "sse";
    std::string user_id;
    std::size_t k = 10;
    bool force = false;
    bool with_oracle = false;
    cli::Config config;
    std::vector<std::string> query_terms;
    std::vector<std::string> doc_ids;
    std::optional<std::uint64_t> seed_override;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed_override, "override the configured seed");
    };

    // init
    auto* cmd_init = app.add_subcommand("init", "create a workspace (owner/cloud/user roles)");
    cmd_init->add_option("--root", root, "workspace root directory");
    cmd_init->add_flag("--force", force, "replace an existing workspace");
    add_config_flags(cmd_init, config);

    // keygen
    auto* cmd_keygen = app.add_subcommand("keygen", "generate keys and distribute public material");
    cmd_keygen->add_option("--root", root);
    add_seed(cmd_keygen);

    // build
    std::string corpus_dir, onto_dir, users_file;
    auto* cmd_build = app.add_subcommand("build", "build the encrypted search environment");
    cmd_build->add_option("--root", root);
    cmd_build->add_option("--scheme", scheme_name, "sse or siis");
    cmd_build->add_option("--corpus", corpus_dir, "directory of .txt documents")->required();
    cmd_build->add_option("--onto-corpus", onto_dir, "directory of concept pages")->required();
    cmd_build->add_option("--users", users_file, "TSV user<TAB>doc access rights");
    add_seed(cmd_build);

    // search
    auto* cmd_search = app.add_subcommand("search", "run a ranked encrypted search");
    cmd_search->add_option("--root", root);
    cmd_search->add_option("--scheme", scheme_name);
    cmd_search->add_option("--user", user_id, "user id (siis)");
    cmd_search->add_option("--k", k, "results to return");
    cmd_search->add_flag("--oracle", with_oracle, "also print the plaintext reference ranking");
    cmd_search->add_option("query", query_terms, "query terms")->required();
    add_seed(cmd_search);

    // fetch
    auto* cmd_fetch = app.add_subcommand("fetch", "fetch documents through the hidden block protocol");
    cmd_fetch->add_option("--root", root);
    cmd_fetch->add_option("docs", doc_ids, "document ids")->required();
    add_seed(cmd_fetch);

    // bench
    std::size_t bench_docs = 10000, bench_queries = 20, bench_workers = 1, bench_partitions = 1;
    std::size_t bench_k = 10;
    std::string bench_strategy = "shared";
    std::uint64_t bench_seed = 42;
    auto* cmd_bench = app.add_subcommand("bench", "benchmark batched search, CSV on stdout");
    cmd_bench->add_option("--docs", bench_docs);
    cmd_bench->add_option("--queries", bench_queries);
    cmd_bench->add_option("--workers", bench_workers);
    cmd_bench->add_option("--strategy", bench_strategy, "shared or partitioned");
    cmd_bench->add_option("--partitions", bench_partitions);
    cmd_bench->add_option("--k", bench_k);
    cmd_bench->add_option("--seed", bench_seed);

    // eval
    std::string queries_file, qrels_file;
    auto* cmd_eval = app.add_subcommand("eval", "accuracy/recall against a qrels file");
    cmd_eval->add_option("--root", root);
    cmd_eval->add_option("--scheme", scheme_name);
    cmd_eval->add_option("--user", user_id);
    cmd_eval->add_option("--k", k);
    cmd_eval->add_option("--queries", queries_file, "TSV query_id<TAB>text")->required();
    cmd_eval->add_option("--qrels", qrels_file, "TSV query_id<TAB>doc_id")->required();
    add_seed(cmd_eval);

    // leak-check
    auto* cmd_leak = app.add_subcommand("leak-check", "verify the cloud directory holds no secrets");
    cmd_leak->add_option("--root", root);

    // sse file-level commands
    auto* cmd_sse = app.add_subcommand("sse", "file-level vector-scheme operations");
    cmd_sse->require_subcommand(1);
    std::string key_file = "sknn_key.json", onto_file = "ontology.jsonl";
    std::string index_file = "sse_index.bin", trapdoor_file = "trapdoor.bin";
    std::string stopwords_file;
    std::size_t sse_x = 20;
    int sse_u = 3;
    std::size_t sse_min_page_terms = 100;
    std::uint64_t sse_seed = 42;

    auto* cmd_sse_build = cmd_sse->add_subcommand("build-index", "index a corpus into an encrypted index");
    cmd_sse_build->add_option("--corpus", corpus_dir)->required();
    cmd_sse_build->add_option("--onto-corpus", onto_dir)->required();
    cmd_sse_build->add_option("--key", key_file, "key file (created if missing)");
    cmd_sse_build->add_option("--onto-out", onto_file);
    cmd_sse_build->add_option("--out", index_file);
    cmd_sse_build->add_option("--stopwords", stopwords_file);
    cmd_sse_build->add_option("--X", sse_x);
    cmd_sse_build->add_option("--u", sse_u);
    cmd_sse_build->add_option("--min_page_terms", sse_min_page_terms);
    cmd_sse_build->add_option("--seed", sse_seed);

    auto* cmd_sse_trap = cmd_sse->add_subcommand("trapdoor", "encrypt a query");
    cmd_sse_trap->add_option("--key", key_file)->required();
    cmd_sse_trap->add_option("--onto", onto_file)->required();
    cmd_sse_trap->add_option("--out", trapdoor_file);
    cmd_sse_trap->add_option("--stopwords", stopwords_file);
    cmd_sse_trap->add_option("--X", sse_x);
    cmd_sse_trap->add_option("--seed", sse_seed);
    cmd_sse_trap->add_option("query", query_terms)->required();

    auto* cmd_sse_search = cmd_sse->add_subcommand("search", "rank an index against a trapdoor");
    cmd_sse_search->add_option("--index", index_file)->required();
    cmd_sse_search->add_option("--trapdoor", trapdoor_file)->required();
    cmd_sse_search->add_option("--k", k);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_init) {
            cli::init(root, config, force);
            std::cout << "workspace ready at " << root << '\n';
        } else if (*cmd_keygen) {
            auto ws = cli::open(root);
            if (seed_override) ws.config.seed = *seed_override;
            cli::keygen(ws);
            std::cout << "keys written\n";
        } else if (*cmd_build) {
            auto ws = cli::open(root);
            if (seed_override) ws.config.seed = *seed_override;
            std::optional<std::filesystem::path> users;
            if (!users_file.empty()) users = users_file;
            cli::build(ws, cli::scheme_from_string(scheme_name), corpus_dir, onto_dir, users);
            std::cout << "build complete\n";
        } else if (*cmd_search) {
            auto ws = cli::open(root);
            if (seed_override) ws.config.seed = *seed_override;
            auto output = cli::search(ws, cli::scheme_from_string(scheme_name), user_id, k,
                                      query_terms, with_oracle);
            print_hits(output.hits);
            if (with_oracle) {
                std::cout << "# oracle\n";
                print_hits(output.oracle_hits);
            }
        } else if (*cmd_fetch) {
            auto ws = cli::open(root);
            if (seed_override) ws.config.seed = *seed_override;
            for (const auto& file : cli::fetch(ws, doc_ids)) std::cout << file.string() << '\n';
        } else if (*cmd_bench) {
            auto strategy = bench_strategy == "partitioned" ? par::Strategy::partitioned
                                                            : par::Strategy::shared;
            auto row = cli::bench(bench_docs, bench_queries, bench_workers, strategy,
                                  bench_partitions, bench_k, bench_seed);
            std::cout << cli::bench_csv_header() << '\n' << cli::to_csv(row) << '\n';
        } else if (*cmd_eval) {
            auto ws = cli::open(root);
            if (seed_override) ws.config.seed = *seed_override;
            double acc = 0.0, rec = 0.0;
            auto rows = cli::eval(ws, cli::scheme_from_string(scheme_name), user_id, k,
                                  queries_file, qrels_file);
            std::cout << "query_id\taccuracy\trecall\n";
            for (const auto& row : rows) {
                std::cout << row.query_id << '\t' << row.accuracy << '\t' << row.recall << '\n';
                acc += row.accuracy;
                rec += row.recall;
            }
            if (!rows.empty()) {
                std::cout << "mean\t" << acc / static_cast<double>(rows.size()) << '\t'
                          << rec / static_cast<double>(rows.size()) << '\n';
            }
        } else if (*cmd_leak) {
            auto ws = cli::open(root);
            auto violations = cli::leak_check(ws);
            if (violations.empty()) {
                std::cout << "leak-check passed\n";
            } else {
                for (const auto& v : violations) std::cerr << v << '\n';
                return 2;
            }
        } else if (*cmd_sse_build) {
            Rng rng(sse_seed);
            text::Stoplist stoplist;
            if (!stopwords_file.empty()) stoplist = text::load_stoplist(stopwords_file);
            auto corpus = text::load_corpus_dir(corpus_dir);
            auto pages = text::load_corpus_dir(onto_dir);
            onto::BuildOptions onto_opts;
            onto_opts.min_page_terms = sse_min_page_terms;
            auto onto = onto::build_onto(pages, stoplist, onto_opts);
            onto::save_jsonl(onto, onto_file);
            sknn::Key key;
            if (std::filesystem::exists(key_file)) {
                key = sknn::load_key(key_file);
            } else {
                key = sknn::keygen(static_cast<int>(onto.concept_count()), sse_u, rng);
                sknn::save_key(key, key_file);
            }
            auto index = sse::build_index(corpus, stoplist, onto, key, sse_x, sknn::Params{}, rng);
            sse::save_index(index, index_file);
            std::cout << "index rows: " << index.rows.size() << '\n';
        } else if (*cmd_sse_trap) {
            Rng rng(sse_seed);
            text::Stoplist stoplist;
            if (!stopwords_file.empty()) stoplist = text::load_stoplist(stopwords_file);
            auto onto = onto::load_jsonl(onto_file);
            auto key = sknn::load_key(key_file);
            sknn::Params params;
            params.r = rng.uniform(0.5, 2.0);
            params.t = rng.uniform(0.0, 1.0);
            auto trapdoor = sse::trapdoor(query_terms, stoplist, onto, key, sse_x, params, rng);
            sse::save_trapdoor(trapdoor, trapdoor_file);
            std::cout << "trapdoor written to " << trapdoor_file << '\n';
        } else if (*cmd_sse_search) {
            auto index = sse::load_index(index_file);
            auto trapdoor = sse::load_trapdoor(trapdoor_file);
            for (const auto& hit : sse::search(index, trapdoor, k)) {
                std::cout << hit.doc_id << '\t' << hit.primary << '\t' << hit.secondary << '\n';
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
