#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace trimsearch {

/// Raised on malformed or unreadable artifacts (files, records, manifests).
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

// All on-disk integers and floats are little-endian. The helpers below keep
// serialization byte-exact on any host order.
inline bool host_is_little_endian() {
    const std::uint32_t probe = 1;
    std::uint8_t byte0;
    std::memcpy(&byte0, &probe, 1);
    return byte0 == 1;
}

template <typename T>
void write_le(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    if (!host_is_little_endian()) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    }
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
bool read_le(std::istream& in, T& value) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T)))
        return false;
    if (!host_is_little_endian()) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    }
    std::memcpy(&value, buf, sizeof(T));
    return true;
}

template <typename T>
T read_le_or_throw(std::istream& in, const char* what) {
    T value;
    if (!read_le(in, value))
        throw DataError(std::string("truncated read: ") + what);
    return value;
}

template <typename T>
void write_le_array(std::ostream& out, const T* data, std::size_t count) {
    if (host_is_little_endian()) {
        out.write(reinterpret_cast<const char*>(data),
                  static_cast<std::streamsize>(count * sizeof(T)));
    } else {
        for (std::size_t i = 0; i < count; ++i)
            write_le(out, data[i]);
    }
}

template <typename T>
void read_le_array_or_throw(std::istream& in, T* data, std::size_t count, const char* what) {
    if (host_is_little_endian()) {
        if (!in.read(reinterpret_cast<char*>(data),
                     static_cast<std::streamsize>(count * sizeof(T))))
            throw DataError(std::string("truncated read: ") + what);
    } else {
        for (std::size_t i = 0; i < count; ++i)
            data[i] = read_le_or_throw<T>(in, what);
    }
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot open for writing: " + path);
    return out;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open for reading: " + path);
    return in;
}

} // namespace detail
} // namespace trimsearch
