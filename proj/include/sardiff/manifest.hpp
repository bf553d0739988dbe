#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sardiff/tensor_io.hpp"

namespace sardiff {

enum class TargetKind { onehot, logits };
enum class Split { train, test };

inline std::string to_string(TargetKind k) { return k == TargetKind::onehot ? "onehot" : "logits"; }
inline std::string to_string(Split s) { return s == Split::train ? "train" : "test"; }

struct SampleRecord {
    std::string image_path;   // relative to the manifest directory
    std::string target_path;  // relative to the manifest directory
    TargetKind kind = TargetKind::onehot;
    Split split = Split::train;
    std::uint64_t seed = 0;
    std::string role = "original";  // "original" or "generated"
};

// Index of the image/target tensor files forming a dataset (D or the
// generated augmentation set). Target kinds are homogeneous per manifest.
struct DatasetManifest {
    int version = 1;
    std::string id;
    int classes = 0;
    std::vector<SampleRecord> samples;
    nlohmann::json balance;               // serialized BalancingFactor, null if not computed
    std::filesystem::path base_dir;       // set on load; not serialized

    std::vector<std::size_t> indices_of(Split split) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (samples[i].split == split) out.push_back(i);
        return out;
    }
};

namespace detail {

inline TargetKind parse_kind(const std::string& s) {
    if (s == "onehot") return TargetKind::onehot;
    if (s == "logits") return TargetKind::logits;
    throw FormatError("manifest: unknown target kind '" + s + "'");
}

inline Split parse_split(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "test") return Split::test;
    throw FormatError("manifest: unknown split '" + s + "'");
}

}  // namespace detail

inline nlohmann::json manifest_to_json(const DatasetManifest& m) {
    nlohmann::json j;
    j["version"] = m.version;
    j["id"] = m.id;
    j["classes"] = m.classes;
    if (!m.balance.is_null()) j["balance"] = m.balance;
    j["samples"] = nlohmann::json::array();
    for (const auto& s : m.samples) {
        j["samples"].push_back({{"image", s.image_path},
                                {"target", s.target_path},
                                {"kind", to_string(s.kind)},
                                {"split", to_string(s.split)},
                                {"seed", s.seed},
                                {"role", s.role}});
    }
    return j;
}

inline void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + path.string());
    f << manifest_to_json(m).dump(2) << "\n";
    if (!f) throw IoError("write failed: " + path.string());
}

inline DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open manifest: " + path.string());
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("manifest is not valid JSON: " + path.string() + ": " + e.what());
    }
    DatasetManifest m;
    try {
        m.version = j.at("version").get<int>();
        m.id = j.value("id", std::string{});
        m.classes = j.at("classes").get<int>();
        m.balance = j.value("balance", nlohmann::json());
        for (const auto& s : j.at("samples")) {
            SampleRecord r;
            r.image_path = s.at("image").get<std::string>();
            r.target_path = s.at("target").get<std::string>();
            r.kind = detail::parse_kind(s.at("kind").get<std::string>());
            r.split = detail::parse_split(s.at("split").get<std::string>());
            r.seed = s.value("seed", std::uint64_t{0});
            r.role = s.value("role", std::string("original"));
            m.samples.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("manifest field error in " + path.string() + ": " + e.what());
    }
    m.base_dir = path.parent_path();
    return m;
}

struct Sample {
    Tensor image;   // 1×H×W
    Tensor target;  // C×H×W, one-hot or logits per the record kind
};

inline Sample load_sample(const DatasetManifest& m, const SampleRecord& rec) {
    Sample s;
    s.image = tensor_io_read(m.base_dir / rec.image_path);
    s.target = tensor_io_read(m.base_dir / rec.target_path);
    return s;
}

// Closed-world check: every referenced file exists and parses, target kinds
// are homogeneous, shapes agree with the declared class count.
inline void validate_manifest(const DatasetManifest& m) {
    if (m.classes < 2) throw ValidationError("manifest: class count must be >= 2");
    for (std::size_t i = 1; i < m.samples.size(); ++i)
        if (m.samples[i].kind != m.samples[0].kind)
            throw ValidationError("manifest: mixed target kinds");
    for (const auto& rec : m.samples) {
        Sample s = load_sample(m, rec);
        require_rank(s.image, 3, "manifest image");
        require_rank(s.target, 3, "manifest target");
        if (s.image.shape[0] != 1) throw ValidationError("manifest: image must have 1 channel");
        if (s.target.shape[0] != static_cast<std::size_t>(m.classes))
            throw ValidationError("manifest: target channels do not match class count");
        if (s.image.shape[1] != s.target.shape[1] || s.image.shape[2] != s.target.shape[2])
            throw ValidationError("manifest: image/target spatial shapes differ");
    }
}

}  // namespace sardiff
