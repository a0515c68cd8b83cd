#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace nightbench::judge {

/// One test video: its rainy input frames and an optional clean reference.
struct VideoEntry {
    std::string id;
    std::filesystem::path input_dir;
    std::size_t frame_count = 0;
    std::optional<std::filesystem::path> reference_dir;
};

/// Derained outputs of one method (optionally trained on a named dataset).
/// Outputs for video v live in root / v.
struct MethodEntry {
    std::string name;
    std::string dataset;
    std::filesystem::path root;

    /// "name" or "name@dataset"; the identifier verdicts resolve to.
    std::string key() const { return dataset.empty() ? name : name + "@" + dataset; }
    std::filesystem::path output_dir(const std::string& video_id) const { return root / video_id; }
};

struct Manifest {
    std::vector<VideoEntry> videos;
    std::vector<MethodEntry> methods;

    /// Methods whose key or name is listed, in the listed order.
    std::vector<MethodEntry> select(const std::vector<std::string>& names) const;
    void validate() const;
};

/// Relative paths are resolved against `base`.
Manifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
Manifest load_manifest(const std::filesystem::path& path);
nlohmann::json to_json(const Manifest& m);

}  // namespace nightbench::judge
