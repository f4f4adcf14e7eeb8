#pragma once

#include "secidx/sse.hpp"

#include <cstdint>
#include <vector>

namespace secidx::par {

// Batched, partitioned top-k search over an encrypted vector index. A batch
// holds queries destined for the same collection; two strategies exist:
//   shared      - workers score disjoint document shards into one score
//                 table, then rank their documents against the whole table
//                 (a phase barrier separates scoring from ranking);
//   partitioned - every partition computes its own local top-k per query
//                 and a coordinator folds them with merge().
// Both return identical lists for any worker/partition count.

using QueryBatch = std::vector<sse::Trapdoor>;

// Nonincreasing under the quantized two-level ordering, length <= k.
using TopKList = std::vector<sse::ScoredDoc>;

struct ScorePair {
    double primary = 0.0;
    double secondary = 0.0;
};

// R[j] = inner products of this row against batch[j], one entry per query.
std::vector<ScorePair> similarity(const sse::IndexRow& row, const QueryBatch& batch);

// Number of strictly higher scores among `others`; -1 once that count
// exceeds k (ties never increase the rank).
int rank(double score, const std::vector<double>& others, std::size_t k);
int rank(const ScorePair& score, const std::vector<ScorePair>& others, std::size_t k);

// Two-way merge of individually sorted lists, truncated at k. Unsorted
// input raises ContractViolation.
TopKList merge(const TopKList& d1, const TopKList& d2, std::size_t k);

enum class Strategy { shared, partitioned };

struct BatchOptions {
    std::size_t k = 10;
    Strategy strategy = Strategy::shared;
    std::size_t workers = 1;
    std::size_t partitions = 1;
};

std::vector<TopKList> batch_search(const sse::VectorModelIndex& index, const QueryBatch& batch,
                                   const BatchOptions& options);

} // namespace secidx::par
