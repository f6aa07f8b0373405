#pragma once

#include <cstdint>
#include <deque>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/io_util.hpp"
#include "trimsearch/disksim/block_store.hpp"
#include "trimsearch/graph/hnsw.hpp"

namespace trimsearch::disksim {

enum class LayoutKind { Coupled, Decoupled };

inline const char* to_string(LayoutKind k) {
    return k == LayoutKind::Coupled ? "coupled" : "decoupled";
}

inline LayoutKind layout_kind_from_string(const std::string& s) {
    if (s == "coupled")
        return LayoutKind::Coupled;
    if (s == "decoupled")
        return LayoutKind::Decoupled;
    throw std::invalid_argument("unknown layout kind: " + s);
}

/// Placement of vectors and adjacency lists into fixed-size blocks.
/// Coupled: one record [vector][degree u8][neighbor ids] per node, all in data
/// blocks. Decoupled: data blocks hold bare vectors, neighbor blocks hold
/// [degree u8][neighbor ids] records. Both pack a BFS order from node 0 so
/// graph neighbors share blocks.
struct BlockLayout {
    LayoutKind kind = LayoutKind::Decoupled;
    std::size_t block_size = 4096;
    std::size_t dim = 0;
    std::size_t count = 0;
    std::uint32_t entry = 0; // graph entry node, the search start

    std::vector<std::vector<std::uint32_t>> data_blocks;     // block -> resident ids
    std::vector<std::vector<std::uint32_t>> neighbor_blocks; // decoupled only
    std::vector<std::uint32_t> vec_block;                    // id -> data block
    std::vector<std::uint32_t> node_block;                   // id -> neighbor block (decoupled)

    std::size_t coupled_record_bytes(std::size_t degree) const {
        return dim * 4 + 1 + degree * 4;
    }
    std::size_t data_record_bytes() const { return dim * 4; }
    std::size_t neighbor_record_bytes(std::size_t degree) const { return 1 + degree * 4; }

    void save_manifest(const std::string& path) const {
        std::ofstream out(path);
        if (!out)
            throw DataError("cannot open for writing: " + path);
        out << "trimsearch-disk-layout v1\n";
        out << "kind = " << to_string(kind) << "\n";
        out << "block_size = " << block_size << "\n";
        out << "dim = " << dim << "\n";
        out << "count = " << count << "\n";
        out << "entry = " << entry << "\n";
        out << "data_blocks = " << data_blocks.size() << "\n";
        for (const auto& blk : data_blocks) {
            for (std::size_t i = 0; i < blk.size(); ++i)
                out << (i ? " " : "") << blk[i];
            out << "\n";
        }
        out << "neighbor_blocks = " << neighbor_blocks.size() << "\n";
        for (const auto& blk : neighbor_blocks) {
            for (std::size_t i = 0; i < blk.size(); ++i)
                out << (i ? " " : "") << blk[i];
            out << "\n";
        }
        if (!out)
            throw DataError("write failed: " + path);
    }

    static BlockLayout load_manifest(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw DataError("cannot open for reading: " + path);
        std::string line;
        std::getline(in, line);
        if (line != "trimsearch-disk-layout v1")
            throw DataError(path + ": not a disk layout manifest");
        BlockLayout lay;
        auto read_kv = [&](const char* key) {
            std::getline(in, line);
            const std::string prefix = std::string(key) + " = ";
            if (line.rfind(prefix, 0) != 0)
                throw DataError(path + ": expected '" + key + "' line");
            return line.substr(prefix.size());
        };
        lay.kind = layout_kind_from_string(read_kv("kind"));
        lay.block_size = std::stoull(read_kv("block_size"));
        lay.dim = std::stoull(read_kv("dim"));
        lay.count = std::stoull(read_kv("count"));
        lay.entry = static_cast<std::uint32_t>(std::stoul(read_kv("entry")));
        const std::size_t nd = std::stoull(read_kv("data_blocks"));
        lay.data_blocks.resize(nd);
        for (auto& blk : lay.data_blocks) {
            std::getline(in, line);
            std::istringstream ss(line);
            std::uint32_t id;
            while (ss >> id)
                blk.push_back(id);
        }
        const std::size_t nn = std::stoull(read_kv("neighbor_blocks"));
        lay.neighbor_blocks.resize(nn);
        for (auto& blk : lay.neighbor_blocks) {
            std::getline(in, line);
            std::istringstream ss(line);
            std::uint32_t id;
            while (ss >> id)
                blk.push_back(id);
        }
        lay.rebuild_placement();
        return lay;
    }

    void rebuild_placement() {
        vec_block.assign(count, 0);
        for (std::size_t b = 0; b < data_blocks.size(); ++b)
            for (std::uint32_t id : data_blocks[b])
                vec_block[id] = static_cast<std::uint32_t>(b);
        node_block.assign(count, 0);
        for (std::size_t b = 0; b < neighbor_blocks.size(); ++b)
            for (std::uint32_t id : neighbor_blocks[b])
                node_block[id] = static_cast<std::uint32_t>(b);
    }
};

namespace detail_layout {

// BFS over level-0 adjacency starting at node 0; disconnected remainders are
// appended in ascending id order.
inline std::vector<std::uint32_t> bfs_order(const graph::GraphIndex& g) {
    std::vector<std::uint32_t> order;
    order.reserve(g.count);
    std::vector<char> seen(g.count, 0);
    for (std::size_t start = 0; start < g.count; ++start) {
        if (seen[start])
            continue;
        std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(start)};
        seen[start] = 1;
        while (!queue.empty()) {
            const std::uint32_t x = queue.front();
            queue.pop_front();
            order.push_back(x);
            for (std::uint32_t v : g.neighbors(0, x)) {
                if (!seen[v]) {
                    seen[v] = 1;
                    queue.push_back(v);
                }
            }
        }
    }
    return order;
}

// Packs records greedily in the given order: a block is filled until the next
// record does not fit.
inline std::vector<std::vector<std::uint32_t>> pack(const std::vector<std::uint32_t>& order,
                                                    const std::vector<std::size_t>& record_bytes,
                                                    std::size_t block_size) {
    std::vector<std::vector<std::uint32_t>> blocks;
    std::size_t used = block_size; // force a fresh block on the first record
    for (std::uint32_t id : order) {
        const std::size_t need = record_bytes[id];
        if (used + need > block_size) {
            blocks.emplace_back();
            used = 0;
        }
        blocks.back().push_back(id);
        used += need;
    }
    return blocks;
}

} // namespace detail_layout

/// Plans block placement for a graph + dataset. Fails if any single record
/// cannot fit a block.
inline BlockLayout build_layout(const graph::GraphIndex& g, const VectorDataset& ds,
                                LayoutKind kind, std::size_t block_size) {
    if (g.count != ds.count)
        throw std::invalid_argument("build_layout: graph/dataset size mismatch");
    BlockLayout lay;
    lay.kind = kind;
    lay.block_size = block_size;
    lay.dim = ds.dim;
    lay.count = ds.count;
    lay.entry = g.entry;

    std::vector<std::size_t> degree(g.count);
    for (std::size_t i = 0; i < g.count; ++i) {
        degree[i] = g.neighbors(0, static_cast<std::uint32_t>(i)).size();
        if (degree[i] > 255)
            throw DataError("build_layout: degree exceeds the 1-byte record header");
    }

    const auto order = detail_layout::bfs_order(g);
    std::vector<std::size_t> rec(g.count);
    if (kind == LayoutKind::Coupled) {
        for (std::size_t i = 0; i < g.count; ++i) {
            rec[i] = lay.coupled_record_bytes(degree[i]);
            if (rec[i] > block_size)
                throw DataError("build_layout: coupled record of " + std::to_string(rec[i]) +
                                " bytes exceeds block size " + std::to_string(block_size) +
                                "; increase --block-size");
        }
        lay.data_blocks = detail_layout::pack(order, rec, block_size);
    } else {
        if (lay.data_record_bytes() > block_size)
            throw DataError("build_layout: vector record of " +
                            std::to_string(lay.data_record_bytes()) +
                            " bytes exceeds block size " + std::to_string(block_size) +
                            "; increase --block-size");
        std::fill(rec.begin(), rec.end(), lay.data_record_bytes());
        lay.data_blocks = detail_layout::pack(order, rec, block_size);
        for (std::size_t i = 0; i < g.count; ++i) {
            rec[i] = lay.neighbor_record_bytes(degree[i]);
            if (rec[i] > block_size)
                throw DataError("build_layout: neighbor record exceeds block size; "
                                "increase --block-size");
        }
        lay.neighbor_blocks = detail_layout::pack(order, rec, block_size);
    }
    lay.rebuild_placement();
    return lay;
}

/// Serializes all records into the store (data blocks first, then neighbor
/// blocks for decoupled layouts). Block ids are data-block ids followed by
/// neighbor-block ids.
inline void write_blocks(const BlockLayout& lay, const graph::GraphIndex& g,
                         const VectorDataset& ds, BlockStore& store) {
    std::vector<std::uint8_t> buf(lay.block_size, 0);
    auto put_u32 = [&](std::size_t& off, std::uint32_t v) {
        buf[off] = static_cast<std::uint8_t>(v & 0xff);
        buf[off + 1] = static_cast<std::uint8_t>((v >> 8) & 0xff);
        buf[off + 2] = static_cast<std::uint8_t>((v >> 16) & 0xff);
        buf[off + 3] = static_cast<std::uint8_t>((v >> 24) & 0xff);
        off += 4;
    };
    auto put_f32 = [&](std::size_t& off, float f) {
        std::uint32_t v;
        std::memcpy(&v, &f, 4);
        put_u32(off, v);
    };

    for (std::size_t b = 0; b < lay.data_blocks.size(); ++b) {
        std::fill(buf.begin(), buf.end(), 0);
        std::size_t off = 0;
        for (std::uint32_t id : lay.data_blocks[b]) {
            const auto row = ds.row(id);
            for (float f : row)
                put_f32(off, f);
            if (lay.kind == LayoutKind::Coupled) {
                const auto& adj = g.neighbors(0, id);
                buf[off++] = static_cast<std::uint8_t>(adj.size());
                for (std::uint32_t v : adj)
                    put_u32(off, v);
            }
        }
        store.write_block(b, buf.data());
    }
    for (std::size_t b = 0; b < lay.neighbor_blocks.size(); ++b) {
        std::fill(buf.begin(), buf.end(), 0);
        std::size_t off = 0;
        for (std::uint32_t id : lay.neighbor_blocks[b]) {
            const auto& adj = g.neighbors(0, id);
            buf[off++] = static_cast<std::uint8_t>(adj.size());
            for (std::uint32_t v : adj)
                put_u32(off, v);
        }
        store.write_block(lay.data_blocks.size() + b, buf.data());
    }
}

inline std::size_t total_blocks(const BlockLayout& lay) {
    return lay.data_blocks.size() + lay.neighbor_blocks.size();
}

/// Parsed contents of one block (only the fields the layout kind provides).
struct ParsedBlock {
    std::vector<std::uint32_t> ids;
    std::vector<std::vector<float>> vectors;
    std::vector<std::vector<std::uint32_t>> adjacency;
};

namespace detail_layout {

inline std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline float get_f32(const std::uint8_t* p) {
    const std::uint32_t v = get_u32(p);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

} // namespace detail_layout

/// Decodes a data block. For coupled layouts adjacency comes along.
inline ParsedBlock parse_data_block(const BlockLayout& lay, std::size_t block_id,
                                    const std::uint8_t* bytes) {
    ParsedBlock out;
    std::size_t off = 0;
    for (std::uint32_t id : lay.data_blocks[block_id]) {
        out.ids.push_back(id);
        std::vector<float> vec(lay.dim);
        for (std::size_t j = 0; j < lay.dim; ++j, off += 4)
            vec[j] = detail_layout::get_f32(bytes + off);
        out.vectors.push_back(std::move(vec));
        if (lay.kind == LayoutKind::Coupled) {
            const std::size_t deg = bytes[off++];
            std::vector<std::uint32_t> adj(deg);
            for (std::size_t j = 0; j < deg; ++j, off += 4)
                adj[j] = detail_layout::get_u32(bytes + off);
            out.adjacency.push_back(std::move(adj));
        }
    }
    return out;
}

/// Decodes a neighbor block (decoupled layouts). `block_id` is the neighbor
/// block index, not the store block id.
inline ParsedBlock parse_neighbor_block(const BlockLayout& lay, std::size_t block_id,
                                        const std::uint8_t* bytes) {
    ParsedBlock out;
    std::size_t off = 0;
    for (std::uint32_t id : lay.neighbor_blocks[block_id]) {
        out.ids.push_back(id);
        const std::size_t deg = bytes[off++];
        std::vector<std::uint32_t> adj(deg);
        for (std::size_t j = 0; j < deg; ++j, off += 4)
            adj[j] = detail_layout::get_u32(bytes + off);
        out.adjacency.push_back(std::move(adj));
    }
    return out;
}

} // namespace trimsearch::disksim
