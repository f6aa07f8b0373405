#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "trimsearch/core/io_util.hpp"

namespace trimsearch::disksim {

/// Fixed-size block storage. Implementations only move bytes; read accounting
/// lives with the searches.
class BlockStore {
  public:
    virtual ~BlockStore() = default;
    virtual std::size_t block_size() const = 0;
    virtual std::size_t block_count() const = 0;
    virtual void write_block(std::size_t id, const std::uint8_t* bytes) = 0;
    virtual void read_block(std::size_t id, std::uint8_t* out) const = 0;
};

class MemoryBlockStore final : public BlockStore {
  public:
    MemoryBlockStore(std::size_t block_size, std::size_t block_count)
        : block_size_(block_size), data_(block_size * block_count) {}

    std::size_t block_size() const override { return block_size_; }
    std::size_t block_count() const override { return data_.size() / block_size_; }

    void write_block(std::size_t id, const std::uint8_t* bytes) override {
        std::memcpy(data_.data() + id * block_size_, bytes, block_size_);
    }

    void read_block(std::size_t id, std::uint8_t* out) const override {
        std::memcpy(out, data_.data() + id * block_size_, block_size_);
    }

  private:
    std::size_t block_size_;
    std::vector<std::uint8_t> data_;
};

/// One flat file, block id * block_size addressing.
class FileBlockStore final : public BlockStore {
  public:
    FileBlockStore(const std::string& path, std::size_t block_size, std::size_t block_count,
                   bool create)
        : path_(path), block_size_(block_size), block_count_(block_count) {
        if (create) {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw DataError("cannot create block file: " + path);
            const std::vector<char> zeros(block_size, 0);
            for (std::size_t i = 0; i < block_count; ++i)
                out.write(zeros.data(), static_cast<std::streamsize>(block_size));
            if (!out)
                throw DataError("cannot size block file: " + path);
        }
        file_.open(path, std::ios::binary | std::ios::in | (create ? std::ios::out : std::ios::in));
        if (!file_)
            throw DataError("cannot open block file: " + path);
    }

    std::size_t block_size() const override { return block_size_; }
    std::size_t block_count() const override { return block_count_; }

    void write_block(std::size_t id, const std::uint8_t* bytes) override {
        std::lock_guard<std::mutex> lock(mutex_);
        file_.seekp(static_cast<std::streamoff>(id * block_size_));
        file_.write(reinterpret_cast<const char*>(bytes),
                    static_cast<std::streamsize>(block_size_));
        if (!file_)
            throw DataError("block write failed: " + path_);
    }

    void read_block(std::size_t id, std::uint8_t* out) const override {
        std::lock_guard<std::mutex> lock(mutex_);
        file_.seekg(static_cast<std::streamoff>(id * block_size_));
        file_.read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(block_size_));
        if (!file_)
            throw DataError("block read failed: " + path_);
    }

  private:
    std::string path_;
    std::size_t block_size_;
    std::size_t block_count_;
    mutable std::mutex mutex_;
    mutable std::fstream file_;
};

} // namespace trimsearch::disksim
