#pragma once

// Little-endian encode/decode for the binary file formats. Bytes are
// assembled explicitly so the files are identical on any host.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "decern/error.hpp"

namespace decern::detail {

template <typename U>
void put_le(std::ostream& out, U value) {
    std::array<char, sizeof(U)> bytes{};
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
    }
    out.write(bytes.data(), bytes.size());
}

inline void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

template <typename U>
U get_le(std::istream& in, const char* what) {
    std::array<unsigned char, sizeof(U)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw SchemaError(std::string("truncated file while reading ") + what);
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
    return value;
}

inline double get_f64(std::istream& in, const char* what) {
    return std::bit_cast<double>(get_le<std::uint64_t>(in, what));
}

inline void expect_magic(std::istream& in, const char (&magic)[8]) {
    char buf[8] = {};
    in.read(buf, 8);
    if (!in || std::memcmp(buf, magic, 8) != 0) {
        throw SchemaError("bad magic, expected " + std::string(magic, 8));
    }
}

}  // namespace decern::detail
