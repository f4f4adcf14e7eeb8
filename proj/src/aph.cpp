#include "secidx/aph.hpp"

#include "secidx/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>

namespace secidx::aph {
namespace {

using nlohmann::json;

std::vector<std::uint8_t> pack_block(const std::uint8_t* data, std::size_t len,
                                     std::size_t block_size) {
    // u32 payload length, payload, zero padding to the fixed block size
    std::vector<std::uint8_t> out(4 + block_size, 0);
    for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(len >> (8 * i));
    if (len > 0) std::copy(data, data + len, out.begin() + 4);
    return out;
}

std::vector<std::uint8_t> unpack_block(const std::vector<std::uint8_t>& plain) {
    if (plain.size() < 4) throw DomainError("block payload too short");
    std::size_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::size_t>(plain[i]) << (8 * i);
    if (len > plain.size() - 4) throw DomainError("block length field corrupt");
    return std::vector<std::uint8_t>(plain.begin() + 4, plain.begin() + 4 + len);
}

} // namespace

PrepareResult prepare(const std::vector<DocInput>& docs, const PrepareOptions& options,
                      const aead::Key& key, Rng& rng) {
    if (options.block_size < 16) throw ConfigError("prepare: block size must be >= 16 bytes");
    if (options.versions < 1) throw ConfigError("prepare: need at least one version");
    if (docs.empty()) throw ConfigError("prepare: empty collection");

    PrepareResult out;
    out.tables.versions_per_block = options.versions;

    // split and count blocks first so version ids can be assigned as one
    // shuffled sequence over the whole collection
    struct PlainBlock {
        std::uint64_t doc_alias;
        std::vector<std::uint8_t> packed;
    };
    std::vector<PlainBlock> blocks;
    std::uint64_t next_block_id = 0;
    for (const auto& doc : docs) {
        if (out.correspondence.alias_of_data_id.contains(doc.data_id))
            throw DomainError("duplicate data id: " + doc.data_id);
        out.correspondence.alias_of_data_id[doc.data_id] = doc.doc_alias;
        auto& refs = out.tables.tb[doc.doc_alias];
        if (!refs.empty()) throw DomainError("duplicate doc alias in prepare");
        std::size_t count = std::max<std::size_t>(
            1, (doc.bytes.size() + options.block_size - 1) / options.block_size);
        for (std::size_t b = 0; b < count; ++b) {
            std::size_t offset = b * options.block_size;
            std::size_t len = std::min(options.block_size, doc.bytes.size() - offset);
            if (doc.bytes.empty()) len = 0;
            refs.push_back(BlockRef{next_block_id, static_cast<std::uint32_t>(b + 1)});
            blocks.push_back(PlainBlock{doc.doc_alias,
                                        pack_block(doc.bytes.data() + offset, len,
                                                   options.block_size)});
            next_block_id++;
        }
    }

    const std::uint64_t total_versions =
        next_block_id * static_cast<std::uint64_t>(options.versions);
    std::vector<std::uint64_t> version_ids(total_versions);
    for (std::uint64_t i = 0; i < total_versions; ++i) version_ids[i] = i;
    rng.shuffle(version_ids);

    std::size_t next_version = 0;
    for (std::uint64_t block_id = 0; block_id < next_block_id; ++block_id) {
        auto& versions = out.tables.tv[block_id];
        std::set<std::vector<std::uint8_t>> seen;
        for (std::uint32_t v = 0; v < options.versions; ++v) {
            std::uint64_t vid = version_ids[next_version++];
            std::vector<std::uint8_t> blob;
            do {
                blob = aead::seal(key, blocks[block_id].packed, rng);
            } while (!seen.insert(blob).second);
            out.store.blobs[vid] = std::move(blob);
            versions.push_back(vid);
        }
    }

    // grouping: choose the smallest feasible group size above y + 1, then
    // fill a (groups x Sz) grid column-major with documents ordered by
    // version count; consecutive cells land in distinct groups, so all
    // versions of one document stay separated as long as its version count
    // does not exceed the group count
    std::uint64_t max_doc_versions = 0;
    for (const auto& [_, refs] : out.tables.tb) {
        max_doc_versions = std::max(max_doc_versions,
                                    refs.size() * static_cast<std::uint64_t>(options.versions));
    }

    std::uint32_t sz = 0;
    for (std::uint64_t candidate = options.scramble_y + 2; candidate <= total_versions;
         ++candidate) {
        if (total_versions % candidate != 0) continue;
        if (total_versions / candidate < max_doc_versions) continue;
        sz = static_cast<std::uint32_t>(candidate);
        break;
    }
    if (sz == 0) {
        throw ConfigError("prepare: no feasible group size; collection too small for the "
                          "configured versions and scramble bound");
    }
    out.tables.group_size = sz;
    const std::uint64_t group_count = total_versions / sz;

    std::vector<std::uint64_t> ordered; // all version ids, docs with most versions first
    {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> doc_order; // (count, alias)
        for (const auto& [alias, refs] : out.tables.tb) {
            doc_order.emplace_back(refs.size() * options.versions, alias);
        }
        std::sort(doc_order.begin(), doc_order.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (const auto& [_, alias] : doc_order) {
            for (const auto& ref : out.tables.tb.at(alias))
                for (std::uint64_t vid : out.tables.tv.at(ref.block_id)) ordered.push_back(vid);
        }
    }
    for (std::uint64_t pos = 0; pos < total_versions; ++pos) {
        std::uint64_t group = pos % group_count;
        out.tables.groups[group].push_back(ordered[pos]);
        out.tables.group_of[ordered[pos]] = group;
    }
    return out;
}

std::uint64_t theta1(const BlockTables& tables, std::uint64_t doc_alias) {
    auto it = tables.tb.find(doc_alias);
    if (it == tables.tb.end()) throw NotFoundError("theta1: unknown doc alias");
    std::uint64_t out = 1;
    for (std::size_t i = 0; i < it->second.size(); ++i) {
        if (out > UINT64_MAX / tables.versions_per_block)
            throw DomainError("theta1 overflows a 64-bit integer");
        out *= tables.versions_per_block;
    }
    return out;
}

std::vector<std::uint64_t> FetchPlan::request() const {
    std::vector<std::uint64_t> out = true_versions;
    out.insert(out.end(), dummy_versions.begin(), dummy_versions.end());
    std::sort(out.begin(), out.end());
    return out;
}

FetchPlan build_fetch(std::uint64_t doc_alias, const BlockTables& tables, std::uint32_t x,
                      std::uint32_t y, Rng& rng) {
    auto doc = tables.tb.find(doc_alias);
    if (doc == tables.tb.end()) throw NotFoundError("build_fetch: unknown doc alias");
    bool scramble = !(x == 0 && y == 0);
    if (scramble && x >= y) throw DomainError("build_fetch: need x < y");

    FetchPlan plan;
    plan.doc_alias = doc_alias;
    for (const auto& ref : doc->second) {
        const auto& versions = tables.tv.at(ref.block_id);
        plan.true_versions.push_back(versions[rng.uniform_u64(0, versions.size() - 1)]);
    }

    if (scramble) {
        std::uint64_t lambda = rng.uniform_u64(x + 1, y);
        for (std::uint64_t vid : plan.true_versions) {
            const auto& group = tables.groups.at(tables.group_of.at(vid));
            std::vector<std::uint64_t> pool;
            for (std::uint64_t member : group)
                if (member != vid) pool.push_back(member);
            if (pool.size() < lambda)
                throw Error("group exhausted; Sz > y + 1 invariant violated");
            for (std::uint64_t dummy : rng.sample(std::move(pool), lambda))
                plan.dummy_versions.push_back(dummy);
        }
    }
    return plan;
}

std::map<std::uint64_t, std::vector<std::uint8_t>> serve_fetch(
    const BlockStore& store, const std::vector<std::uint64_t>& request) {
    std::map<std::uint64_t, std::vector<std::uint8_t>> out;
    for (std::uint64_t vid : request) {
        auto it = store.blobs.find(vid);
        if (it == store.blobs.end())
            throw NotFoundError("version " + std::to_string(vid) + " not in store");
        out.emplace(vid, it->second);
    }
    return out;
}

std::vector<std::uint8_t> reconstruct(const FetchPlan& plan,
                                      const std::map<std::uint64_t, std::vector<std::uint8_t>>& blobs,
                                      const aead::Key& key) {
    std::vector<std::uint8_t> out;
    for (std::uint64_t vid : plan.true_versions) {
        auto it = blobs.find(vid);
        if (it == blobs.end())
            throw NotFoundError("reconstruct: version " + std::to_string(vid) + " missing");
        auto payload = unpack_block(aead::open(key, it->second));
        out.insert(out.end(), payload.begin(), payload.end());
    }
    return out;
}

std::vector<LinkFlag> adversary_link(const std::vector<std::vector<std::uint64_t>>& trace) {
    std::vector<std::vector<std::uint64_t>> canonical;
    canonical.reserve(trace.size());
    for (auto request : trace) {
        std::sort(request.begin(), request.end());
        canonical.push_back(std::move(request));
    }
    std::vector<LinkFlag> flags;
    for (std::size_t j = 1; j < canonical.size(); ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if (canonical[i] == canonical[j]) {
                flags.push_back(LinkFlag{i + 1, j + 1, canonical[j]});
            }
        }
    }
    return flags;
}

void save_store(const BlockStore& store, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [vid, blob] : store.blobs) {
        std::ofstream out(dir / (std::to_string(vid) + ".blk"),
                          std::ios::trunc | std::ios::binary);
        if (!out) throw ConfigError("cannot write block file in " + dir.string());
        out.write(reinterpret_cast<const char*>(blob.data()),
                  static_cast<std::streamsize>(blob.size()));
    }
}

BlockStore load_store(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw ConfigError("block store directory not found: " + dir.string());
    BlockStore store;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".blk") continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::vector<std::uint8_t> blob((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
        store.blobs[std::stoull(entry.path().stem().string())] = std::move(blob);
    }
    return store;
}

std::map<std::uint64_t, std::vector<std::uint8_t>> load_blobs(
    const std::filesystem::path& dir, const std::vector<std::uint64_t>& request) {
    std::map<std::uint64_t, std::vector<std::uint8_t>> out;
    for (std::uint64_t vid : request) {
        std::ifstream in(dir / (std::to_string(vid) + ".blk"), std::ios::binary);
        if (!in) throw NotFoundError("version " + std::to_string(vid) + " not in store");
        out.emplace(vid, std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                                   std::istreambuf_iterator<char>()));
    }
    return out;
}

void save_tables_sealed(const BlockTables& tables, const CorrespondenceTable& correspondence,
                        const aead::Key& key, const std::filesystem::path& file, Rng& rng) {
    json j;
    j["versions_per_block"] = tables.versions_per_block;
    j["group_size"] = tables.group_size;
    auto& tb = j["tb"] = json::object();
    for (const auto& [alias, refs] : tables.tb) {
        auto& arr = tb[std::to_string(alias)] = json::array();
        for (const auto& ref : refs) arr.push_back(json::array({ref.block_id, ref.rank}));
    }
    auto& tv = j["tv"] = json::object();
    for (const auto& [block, versions] : tables.tv) tv[std::to_string(block)] = versions;
    auto& groups = j["groups"] = json::object();
    for (const auto& [group, versions] : tables.groups) groups[std::to_string(group)] = versions;
    auto& corr = j["correspondence"] = json::object();
    for (const auto& [data_id, alias] : correspondence.alias_of_data_id) corr[data_id] = alias;
    aead::write_sealed_file(key, file, j.dump(), rng);
}

void load_tables_sealed(const aead::Key& key, const std::filesystem::path& file,
                        BlockTables& tables, CorrespondenceTable& correspondence) {
    json j = json::parse(aead::read_sealed_file(key, file));
    tables = BlockTables{};
    correspondence = CorrespondenceTable{};
    tables.versions_per_block = j.at("versions_per_block").get<std::uint32_t>();
    tables.group_size = j.at("group_size").get<std::uint32_t>();
    for (const auto& [alias, refs] : j.at("tb").items()) {
        auto& out = tables.tb[std::stoull(alias)];
        for (const auto& ref : refs)
            out.push_back(BlockRef{ref.at(0).get<std::uint64_t>(), ref.at(1).get<std::uint32_t>()});
    }
    for (const auto& [block, versions] : j.at("tv").items())
        tables.tv[std::stoull(block)] = versions.get<std::vector<std::uint64_t>>();
    for (const auto& [group, versions] : j.at("groups").items()) {
        std::uint64_t gid = std::stoull(group);
        tables.groups[gid] = versions.get<std::vector<std::uint64_t>>();
        for (std::uint64_t vid : tables.groups[gid]) tables.group_of[vid] = gid;
    }
    for (const auto& [data_id, alias] : j.at("correspondence").items())
        correspondence.alias_of_data_id[data_id] = alias.get<std::uint64_t>();
}

} // namespace secidx::aph
