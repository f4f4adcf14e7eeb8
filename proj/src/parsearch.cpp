#include "secidx/parsearch.hpp"

#include "secidx/error.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <numeric>
#include <thread>

namespace secidx::par {
namespace {

struct Keyed {
    double primary, secondary;
    std::int64_t pk, sk;
    std::uint32_t id_rank; // position in doc_id-sorted order, breaks ties
};

// total order including the doc tie-break (slot placement)
bool ranked_before(const Keyed& a, const Keyed& b) {
    if (a.pk != b.pk) return a.pk > b.pk;
    if (a.sk != b.sk) return a.sk > b.sk;
    return a.id_rank < b.id_rank;
}

void check_sorted(const TopKList& list, const char* who) {
    for (std::size_t i = 1; i < list.size(); ++i) {
        if (sse::ranks_before(list[i], list[i - 1]))
            throw ContractViolation(std::string(who) + ": input list is not sorted");
    }
}

std::vector<std::pair<std::size_t, std::size_t>> chunk(std::size_t total, std::size_t parts) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t base = parts ? total / parts : 0;
    std::size_t extra = parts ? total % parts : 0;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < parts; ++i) {
        std::size_t len = base + (i < extra ? 1 : 0);
        out.emplace_back(begin, begin + len);
        begin += len;
    }
    return out;
}

void run_workers(std::size_t workers, const std::function<void(std::size_t)>& body) {
    if (workers <= 1) {
        body(0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
}

} // namespace

std::vector<ScorePair> similarity(const sse::IndexRow& row, const QueryBatch& batch) {
    std::vector<ScorePair> out;
    out.reserve(batch.size());
    for (const auto& trapdoor : batch) {
        out.push_back(ScorePair{sknn::eval(row.primary, trapdoor.primary),
                                sknn::eval(row.secondary, trapdoor.secondary)});
    }
    return out;
}

int rank(double score, const std::vector<double>& others, std::size_t k) {
    if (k < 1) throw DomainError("rank: k must be >= 1");
    std::size_t r = 0;
    for (double other : others) {
        if (other > score) r++;
        if (r > k) return -1;
    }
    return static_cast<int>(r);
}

int rank(const ScorePair& score, const std::vector<ScorePair>& others, std::size_t k) {
    if (k < 1) throw DomainError("rank: k must be >= 1");
    auto pk = sse::score_key(score.primary);
    auto sk = sse::score_key(score.secondary);
    std::size_t r = 0;
    for (const auto& other : others) {
        auto opk = sse::score_key(other.primary);
        if (opk > pk || (opk == pk && sse::score_key(other.secondary) > sk)) r++;
        if (r > k) return -1;
    }
    return static_cast<int>(r);
}

TopKList merge(const TopKList& d1, const TopKList& d2, std::size_t k) {
    check_sorted(d1, "merge");
    check_sorted(d2, "merge");
    TopKList out;
    out.reserve(std::min(k, d1.size() + d2.size()));
    std::size_t x = 0, y = 0;
    while (out.size() < k && (x < d1.size() || y < d2.size())) {
        if (y >= d2.size() || (x < d1.size() && sse::ranks_before(d1[x], d2[y]))) {
            out.push_back(d1[x++]);
        } else {
            out.push_back(d2[y++]);
        }
    }
    return out;
}

std::vector<TopKList> batch_search(const sse::VectorModelIndex& index, const QueryBatch& batch,
                                   const BatchOptions& options) {
    if (options.k < 1) throw DomainError("batch_search: k must be >= 1");
    if (options.workers < 1) throw DomainError("batch_search: workers must be >= 1");
    if (options.partitions < 1) throw DomainError("batch_search: partitions must be >= 1");
    if (batch.empty()) return {};

    std::size_t dim = index.concept_dim + index.dummy_dims + 1;
    for (const auto& t : batch) {
        if (static_cast<std::size_t>(t.primary.a.size()) != dim)
            throw KeyMismatchError("batch_search: trapdoor dimension does not match index");
    }

    const std::size_t docs = index.rows.size();
    const std::size_t queries = batch.size();
    const std::size_t k = options.k;

    // doc_id tie-break as a precomputed permutation rank
    std::vector<std::uint32_t> id_rank(docs);
    {
        std::vector<std::uint32_t> order(docs);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return index.rows[a].doc_id < index.rows[b].doc_id;
        });
        for (std::uint32_t pos = 0; pos < docs; ++pos) id_rank[order[pos]] = pos;
    }

    std::vector<std::vector<Keyed>> table(queries);
    for (auto& row : table) row.resize(docs);

    auto score_shard = [&](std::size_t begin, std::size_t end) {
        for (std::size_t d = begin; d < end; ++d) {
            auto scores = similarity(index.rows[d], batch);
            for (std::size_t q = 0; q < queries; ++q) {
                table[q][d] = Keyed{scores[q].primary, scores[q].secondary,
                                    sse::score_key(scores[q].primary),
                                    sse::score_key(scores[q].secondary), id_rank[d]};
            }
        }
    };

    std::vector<TopKList> results(queries);
    for (auto& r : results) r.resize(std::min(k, docs));

    if (options.strategy == Strategy::shared) {
        auto shards = chunk(docs, options.workers);

        // phase 1: similarity over disjoint shards
        run_workers(options.workers, [&](std::size_t w) {
            score_shard(shards[w].first, shards[w].second);
        });

        // phase 2 (after the barrier): rank each document against the
        // whole table; a document whose running rank leaves the top k is
        // abandoned early
        run_workers(options.workers, [&](std::size_t w) {
            for (std::size_t q = 0; q < queries; ++q) {
                const auto& row = table[q];
                for (std::size_t d = shards[w].first; d < shards[w].second; ++d) {
                    std::size_t r = 0;
                    for (std::size_t x = 0; x < docs; ++x) {
                        if (ranked_before(row[x], row[d])) {
                            if (++r >= k) break;
                        }
                    }
                    if (r < k) {
                        results[q][r] = sse::ScoredDoc{index.rows[d].doc_id, row[d].primary,
                                                       row[d].secondary};
                    }
                }
            }
        });
        return results;
    }

    // partitioned: local top-k per shard, folded by the coordinator
    auto shards = chunk(docs, options.partitions);
    std::vector<std::vector<TopKList>> local(options.partitions);
    std::atomic<std::size_t> next{0};
    run_workers(std::min(options.workers, options.partitions), [&](std::size_t) {
        for (std::size_t p = next.fetch_add(1); p < options.partitions; p = next.fetch_add(1)) {
            score_shard(shards[p].first, shards[p].second);
            auto& lists = local[p];
            lists.resize(queries);
            std::vector<std::size_t> idx;
            for (std::size_t q = 0; q < queries; ++q) {
                idx.resize(shards[p].second - shards[p].first);
                std::iota(idx.begin(), idx.end(), shards[p].first);
                const auto& row = table[q];
                std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                    return ranked_before(row[a], row[b]);
                });
                if (idx.size() > k) idx.resize(k);
                for (std::size_t d : idx) {
                    lists[q].push_back(
                        sse::ScoredDoc{index.rows[d].doc_id, row[d].primary, row[d].secondary});
                }
            }
        }
    });

    for (std::size_t q = 0; q < queries; ++q) {
        TopKList acc;
        for (std::size_t p = 0; p < options.partitions; ++p) acc = merge(acc, local[p][q], k);
        results[q] = std::move(acc);
    }
    return results;
}

} // namespace secidx::par
