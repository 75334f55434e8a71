#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "denoise/errors.hpp"
#include "denoise/noise.hpp"

namespace denoise {

/// One corpus sound as tracked through prepare/corrupt.
struct ManifestFile {
    std::string id;
    std::string category;
    std::string clean_wav;
    std::string noisy_wav;  // empty until corrupt
};

/// The corpus manifest produced by `prepare` and extended by `corrupt`.
struct CorpusManifest {
    std::vector<ManifestFile> files;
    std::optional<NoiseSpec> noise;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["version"] = 1;
        if (noise) j["noise"] = noise->to_json();
        j["files"] = nlohmann::json::array();
        for (const auto& f : files) {
            nlohmann::json entry{{"id", f.id},
                                 {"category", f.category},
                                 {"clean_wav", f.clean_wav}};
            if (!f.noisy_wav.empty()) entry["noisy_wav"] = f.noisy_wav;
            j["files"].push_back(std::move(entry));
        }
        return j;
    }

    static CorpusManifest from_json(const nlohmann::json& j) {
        CorpusManifest m;
        if (j.value("version", 0) != 1) throw Error("manifest: unsupported version");
        if (j.contains("noise")) m.noise = NoiseSpec::from_json(j.at("noise"));
        for (const auto& entry : j.at("files")) {
            ManifestFile f;
            f.id = entry.at("id").get<std::string>();
            f.category = entry.at("category").get<std::string>();
            f.clean_wav = entry.at("clean_wav").get<std::string>();
            f.noisy_wav = entry.value("noisy_wav", "");
            m.files.push_back(std::move(f));
        }
        return m;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw IoFailure("manifest: cannot write " + path);
        out << to_json().dump(2) << '\n';
    }

    static CorpusManifest load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoFailure("manifest: cannot open " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw IoFailure("manifest: bad JSON in " + path + ": " + e.what());
        }
        return from_json(j);
    }
};

}  // namespace denoise
