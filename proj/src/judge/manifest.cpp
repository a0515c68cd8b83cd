#include "nightbench/judge/manifest.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>

#include "nightbench/core/error.hpp"

namespace nightbench::judge {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& p, const fs::path& base) { return p.is_absolute() || base.empty() ? p : base / p; }

}  // namespace

std::vector<MethodEntry> Manifest::select(const std::vector<std::string>& names) const {
    std::vector<MethodEntry> out;
    for (const std::string& n : names) {
        bool found = false;
        for (const MethodEntry& m : methods) {
            if (m.key() == n || (m.name == n && m.dataset.empty())) {
                out.push_back(m);
                found = true;
            }
        }
        if (!found) {
            // A bare name selects every dataset variant of the method.
            for (const MethodEntry& m : methods) {
                if (m.name == n) {
                    out.push_back(m);
                    found = true;
                }
            }
        }
        if (!found) throw ValidationError(fmt::format("manifest has no method '{}'", n));
    }
    return out;
}

void Manifest::validate() const {
    std::set<std::string> ids;
    for (const VideoEntry& v : videos) {
        if (v.id.empty()) throw ValidationError("manifest video id must not be empty");
        if (!ids.insert(v.id).second) throw ValidationError(fmt::format("duplicate video id '{}'", v.id));
        if (v.frame_count == 0) throw ValidationError(fmt::format("video '{}' has no frames", v.id));
    }
    std::set<std::string> keys;
    for (const MethodEntry& m : methods) {
        if (m.name.empty()) throw ValidationError("manifest method name must not be empty");
        if (!keys.insert(m.key()).second) throw ValidationError(fmt::format("duplicate method '{}'", m.key()));
    }
}

Manifest manifest_from_json(const nlohmann::json& j, const fs::path& base) {
    Manifest m;
    try {
        for (const auto& v : j.at("videos")) {
            VideoEntry e;
            e.id = v.at("id").get<std::string>();
            e.input_dir = resolve(v.at("input").get<std::string>(), base);
            e.frame_count = v.at("frames").get<std::size_t>();
            if (v.contains("reference") && !v["reference"].is_null()) e.reference_dir = resolve(v["reference"].get<std::string>(), base);
            m.videos.push_back(std::move(e));
        }
        for (const auto& x : j.at("methods")) {
            MethodEntry e;
            e.name = x.at("name").get<std::string>();
            e.dataset = x.value("dataset", std::string{});
            e.root = resolve(x.at("root").get<std::string>(), base);
            m.methods.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(fmt::format("malformed manifest: {}", e.what()));
    }
    m.validate();
    return m;
}

Manifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(fmt::format("manifest {} is not valid JSON: {}", path.string(), e.what()));
    }
    return manifest_from_json(j, path.parent_path());
}

nlohmann::json to_json(const Manifest& m) {
    nlohmann::json videos = nlohmann::json::array();
    for (const VideoEntry& v : m.videos) {
        nlohmann::json e{{"id", v.id}, {"input", v.input_dir.string()}, {"frames", v.frame_count}};
        if (v.reference_dir) e["reference"] = v.reference_dir->string();
        videos.push_back(std::move(e));
    }
    nlohmann::json methods = nlohmann::json::array();
    for (const MethodEntry& x : m.methods) {
        nlohmann::json e{{"name", x.name}, {"root", x.root.string()}};
        if (!x.dataset.empty()) e["dataset"] = x.dataset;
        methods.push_back(std::move(e));
    }
    return {{"videos", videos}, {"methods", methods}};
}

}  // namespace nightbench::judge
