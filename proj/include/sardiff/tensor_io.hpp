#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sardiff/errors.hpp"
#include "sardiff/tensor.hpp"

namespace sardiff {

// Binary tensor container, little-endian throughout:
//   magic "DKTN" | version u8=1 | dtype u8 (0 = float32) | ndim u8 |
//   reserved u8=0 | ndim x u32 extents | row-major float32 payload
inline constexpr char TENSOR_MAGIC[4] = {'D', 'K', 'T', 'N'};
inline constexpr std::size_t TENSOR_MAX_NDIM = 8;

namespace detail {

inline void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline std::uint32_t get_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline std::string encode_tensor(const Tensor& t) {
    if (t.rank() > TENSOR_MAX_NDIM)
        throw FormatError("tensor rank " + std::to_string(t.rank()) + " exceeds container limit");
    for (std::size_t e : t.shape)
        if (e > UINT32_MAX) throw FormatError("tensor extent exceeds u32 container limit");
    std::string out;
    out.reserve(8 + 4 * t.rank() + 4 * t.numel());
    out.append(TENSOR_MAGIC, 4);
    out.push_back(1);                             // version
    out.push_back(0);                             // dtype float32
    out.push_back(static_cast<char>(t.rank()));   // ndim
    out.push_back(0);                             // reserved
    for (std::size_t e : t.shape) detail::put_u32le(out, static_cast<std::uint32_t>(e));
    for (float v : t.data) detail::put_u32le(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

// Decodes one tensor starting at `offset` within `bytes`; advances `offset`
// past it. Errors name the absolute byte offset of the defect.
inline Tensor decode_tensor(const std::string& bytes, std::size_t& offset) {
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t base = offset;
    auto need = [&](std::size_t n, const char* what) {
        if (bytes.size() - offset < n)
            throw FormatError(std::string("truncated tensor container: ") + what + " at offset " +
                              std::to_string(offset));
    };
    need(8, "header");
    if (std::memcmp(p + offset, TENSOR_MAGIC, 4) != 0)
        throw FormatError("bad tensor magic at offset " + std::to_string(base));
    if (p[offset + 4] != 1)
        throw FormatError("unsupported tensor container version at offset " +
                          std::to_string(base + 4));
    if (p[offset + 5] != 0)
        throw FormatError("unsupported tensor dtype at offset " + std::to_string(base + 5));
    const std::size_t ndim = p[offset + 6];
    if (ndim == 0 || ndim > TENSOR_MAX_NDIM)
        throw FormatError("tensor ndim out of range at offset " + std::to_string(base + 6));
    if (p[offset + 7] != 0)
        throw FormatError("nonzero reserved byte at offset " + std::to_string(base + 7));
    offset += 8;

    std::vector<std::size_t> shape(ndim);
    std::size_t numel = 1;
    for (std::size_t i = 0; i < ndim; ++i) {
        need(4, "extent");
        std::uint32_t e = detail::get_u32le(p + offset);
        if (e == 0) throw FormatError("zero extent at offset " + std::to_string(offset));
        if (numel > SIZE_MAX / e)
            throw FormatError("tensor size overflows at offset " + std::to_string(offset));
        shape[i] = e;
        numel *= e;
        offset += 4;
    }
    need(4 * numel, "payload");
    Tensor t(shape);
    for (std::size_t i = 0; i < numel; ++i) {
        t.data[i] = std::bit_cast<float>(detail::get_u32le(p + offset));
        offset += 4;
    }
    return t;
}

inline void tensor_io_write(const std::filesystem::path& path, const Tensor& t) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    std::string bytes = encode_tensor(t);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

inline Tensor tensor_io_read(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    std::size_t offset = 0;
    Tensor t = decode_tensor(bytes, offset);
    if (offset != bytes.size())
        throw FormatError("trailing bytes after tensor at offset " + std::to_string(offset) +
                          " in " + path.string());
    return t;
}

}  // namespace sardiff
