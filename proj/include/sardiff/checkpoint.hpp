#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sardiff/tensor_io.hpp"

namespace sardiff {

// Checkpoint = JSON header (architecture, step count, extras) followed by one
// tensor container blob per entry of header["tensors"], in that order:
//   magic "DKCP" | version u8=1 | reserved u8x3 | u32 LE header length |
//   header JSON | tensor blobs
inline constexpr char CHECKPOINT_MAGIC[4] = {'D', 'K', 'C', 'P'};

struct Checkpoint {
    nlohmann::json header;
    std::vector<std::pair<std::string, Tensor>> tensors;
};

inline void write_checkpoint(const std::filesystem::path& path, nlohmann::json header,
                             const std::vector<std::pair<std::string, Tensor>>& tensors) {
    std::vector<std::string> names;
    names.reserve(tensors.size());
    for (const auto& [name, t] : tensors) names.push_back(name);
    header["tensors"] = names;
    std::string body = header.dump();

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    std::string out;
    out.append(CHECKPOINT_MAGIC, 4);
    out.push_back(1);
    out.append(3, '\0');
    detail::put_u32le(out, static_cast<std::uint32_t>(body.size()));
    out += body;
    for (const auto& [name, t] : tensors) out += encode_tensor(t);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

inline Checkpoint read_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for reading: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (bytes.size() < 12 || std::memcmp(bytes.data(), CHECKPOINT_MAGIC, 4) != 0)
        throw FormatError("bad checkpoint magic at offset 0 in " + path.string());
    if (bytes[4] != 1)
        throw FormatError("unsupported checkpoint version at offset 4 in " + path.string());
    std::size_t hlen = detail::get_u32le(reinterpret_cast<const unsigned char*>(bytes.data()) + 8);
    if (bytes.size() < 12 + hlen)
        throw FormatError("truncated checkpoint header at offset 12 in " + path.string());

    Checkpoint ck;
    try {
        ck.header = nlohmann::json::parse(bytes.substr(12, hlen));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("invalid checkpoint header JSON: " + std::string(e.what()));
    }
    if (!ck.header.contains("tensors") || !ck.header["tensors"].is_array())
        throw FormatError("checkpoint header missing tensor list");
    std::size_t offset = 12 + hlen;
    for (const auto& name : ck.header["tensors"]) {
        Tensor t = decode_tensor(bytes, offset);
        ck.tensors.emplace_back(name.get<std::string>(), std::move(t));
    }
    if (offset != bytes.size())
        throw FormatError("trailing bytes after checkpoint tensors at offset " +
                          std::to_string(offset));
    return ck;
}

}  // namespace sardiff
