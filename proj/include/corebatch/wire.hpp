#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "corebatch/errors.hpp"

// Little-endian on-disk codec shared by the embedding cache and model
// checkpoint writers. Byte order is explicit so files are portable.

namespace corebatch::wire {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline void put_f32(std::ostream& os, float v) { put_u32(os, std::bit_cast<std::uint32_t>(v)); }

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline bool get_bytes(std::istream& is, void* dst, std::size_t n) {
    is.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(is.gcount()) == n;
}

inline std::uint32_t get_u32(std::istream& is, const char* field) {
    unsigned char b[4];
    if (!get_bytes(is, b, 4)) throw FormatError(std::string("file truncated in ") + field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline std::uint64_t get_u64(std::istream& is, const char* field) {
    unsigned char b[8];
    if (!get_bytes(is, b, 8)) throw FormatError(std::string("file truncated in ") + field);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline float get_f32(std::istream& is, const char* field) {
    return std::bit_cast<float>(get_u32(is, field));
}

inline double get_f64(std::istream& is, const char* field) {
    return std::bit_cast<double>(get_u64(is, field));
}

}  // namespace corebatch::wire
