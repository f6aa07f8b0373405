#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/io_util.hpp"

namespace trimsearch {

enum class ElementKind { Float32, Uint8, Int32 };

inline ElementKind element_kind_from_string(const std::string& s) {
    if (s == "float32" || s == "fvecs")
        return ElementKind::Float32;
    if (s == "uint8" || s == "bvecs")
        return ElementKind::Uint8;
    if (s == "int32" || s == "ivecs")
        return ElementKind::Int32;
    throw std::invalid_argument("unknown element kind: " + s);
}

/// Guesses the element kind from a .fvecs/.bvecs/.ivecs extension.
inline ElementKind element_kind_from_path(const std::string& path) {
    auto ends_with = [&](const char* suf) {
        const std::string s(suf);
        return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".fvecs"))
        return ElementKind::Float32;
    if (ends_with(".bvecs"))
        return ElementKind::Uint8;
    if (ends_with(".ivecs"))
        return ElementKind::Int32;
    throw std::invalid_argument("cannot infer element kind from path: " + path);
}

/// Reads repeated `[int32 d little-endian][d elements]` records. All records
/// must share d; uint8/int32 elements are widened to float. `max_rows` caps
/// the number of records read (0 means all).
inline VectorDataset load_vecs(const std::string& path, ElementKind kind,
                               std::size_t max_rows = 0) {
    std::ifstream in = detail::open_input(path);
    VectorDataset ds;
    std::vector<std::uint8_t> u8buf;
    std::vector<std::int32_t> i32buf;

    std::int32_t d = 0;
    while (detail::read_le(in, d)) {
        if (d <= 0)
            throw DataError(path + ": record with non-positive dimension");
        if (ds.count == 0) {
            ds.dim = static_cast<std::size_t>(d);
        } else if (ds.dim != static_cast<std::size_t>(d)) {
            throw DataError(path + ": inconsistent dimension across records");
        }
        const std::size_t dim = ds.dim;
        const std::size_t base = ds.data.size();
        ds.data.resize(base + dim);
        switch (kind) {
            case ElementKind::Float32:
                detail::read_le_array_or_throw(in, ds.data.data() + base, dim, "fvecs record");
                break;
            case ElementKind::Uint8:
                u8buf.resize(dim);
                detail::read_le_array_or_throw(in, u8buf.data(), dim, "bvecs record");
                for (std::size_t j = 0; j < dim; ++j)
                    ds.data[base + j] = static_cast<float>(u8buf[j]);
                break;
            case ElementKind::Int32:
                i32buf.resize(dim);
                detail::read_le_array_or_throw(in, i32buf.data(), dim, "ivecs record");
                for (std::size_t j = 0; j < dim; ++j)
                    ds.data[base + j] = static_cast<float>(i32buf[j]);
                break;
        }
        ++ds.count;
        if (max_rows != 0 && ds.count == max_rows)
            break;
    }
    if (ds.count == 0)
        throw DataError(path + ": empty vecs file (dimension undetermined)");
    ds.validate();
    return ds;
}

/// Writes a dataset as float32 records (fvecs).
inline void write_fvecs(const std::string& path, const VectorDataset& ds) {
    std::ofstream out = detail::open_output(path);
    for (std::size_t i = 0; i < ds.count; ++i) {
        detail::write_le(out, static_cast<std::int32_t>(ds.dim));
        detail::write_le_array(out, ds.data.data() + i * ds.dim, ds.dim);
    }
    if (!out)
        throw DataError("write failed: " + path);
}

/// Writes variable-length int32 id records (ivecs).
inline void write_ivecs(const std::string& path,
                        const std::vector<std::vector<std::uint32_t>>& rows) {
    std::ofstream out = detail::open_output(path);
    for (const auto& row : rows) {
        detail::write_le(out, static_cast<std::int32_t>(row.size()));
        for (std::uint32_t v : row)
            detail::write_le(out, static_cast<std::int32_t>(v));
    }
    if (!out)
        throw DataError("write failed: " + path);
}

/// Writes variable-length float32 records (fvecs with per-row lengths).
inline void write_fvecs_rows(const std::string& path,
                             const std::vector<std::vector<float>>& rows) {
    std::ofstream out = detail::open_output(path);
    for (const auto& row : rows) {
        detail::write_le(out, static_cast<std::int32_t>(row.size()));
        detail::write_le_array(out, row.data(), row.size());
    }
    if (!out)
        throw DataError("write failed: " + path);
}

/// Reads variable-length int32 records as unsigned ids.
inline std::vector<std::vector<std::uint32_t>> load_ivecs_rows(const std::string& path) {
    std::ifstream in = detail::open_input(path);
    std::vector<std::vector<std::uint32_t>> rows;
    std::int32_t d = 0;
    while (detail::read_le(in, d)) {
        if (d < 0)
            throw DataError(path + ": negative record length");
        std::vector<std::uint32_t> row(static_cast<std::size_t>(d));
        for (auto& v : row)
            v = static_cast<std::uint32_t>(detail::read_le_or_throw<std::int32_t>(in, "ivecs record"));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<std::vector<float>> load_fvecs_rows(const std::string& path) {
    std::ifstream in = detail::open_input(path);
    std::vector<std::vector<float>> rows;
    std::int32_t d = 0;
    while (detail::read_le(in, d)) {
        if (d < 0)
            throw DataError(path + ": negative record length");
        std::vector<float> row(static_cast<std::size_t>(d));
        detail::read_le_array_or_throw(in, row.data(), row.size(), "fvecs record");
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace trimsearch
