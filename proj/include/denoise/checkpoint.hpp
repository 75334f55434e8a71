#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "denoise/errors.hpp"
#include "denoise/model.hpp"

namespace denoise {

namespace detail {

template <typename T>
std::vector<std::size_t> param_shape(const Autoencoder<T>& model, std::size_t ref_index) {
    const std::size_t n_enc = model.encoder.size();
    const std::size_t n_dec = model.decoder.size();
    const std::size_t layer = ref_index / 2;
    const bool is_bias = ref_index % 2 != 0;
    if (layer < n_enc) {
        const auto& l = model.encoder[layer];
        if (is_bias) return {l.out_channels};
        return {l.kernel, l.in_channels, l.out_channels};
    }
    if (layer < n_enc + n_dec) {
        const auto& l = model.decoder[layer - n_enc];
        if (is_bias) return {l.out_channels};
        return {l.kernel, l.out_channels, l.in_channels};
    }
    if (is_bias) return {model.head.out_channels};
    return {model.head.kernel, model.head.in_channels, model.head.out_channels};
}

inline void append_f32le(std::string& out, float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

inline float read_f32le(const unsigned char* p) {
    const std::uint32_t u = static_cast<std::uint32_t>(p[0]) |
                            (static_cast<std::uint32_t>(p[1]) << 8) |
                            (static_cast<std::uint32_t>(p[2]) << 16) |
                            (static_cast<std::uint32_t>(p[3]) << 24);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

}  // namespace detail

inline nlohmann::json arch_to_json(const Architecture& arch) {
    return {{"encoder", arch.encoder_channels},
            {"decoder", arch.decoder_channels},
            {"kernel", arch.kernel},
            {"stride", arch.stride}};
}

inline Architecture arch_from_json(const nlohmann::json& j) {
    Architecture arch;
    arch.encoder_channels = j.at("encoder").get<std::vector<std::size_t>>();
    arch.decoder_channels = j.at("decoder").get<std::vector<std::size_t>>();
    arch.kernel = j.at("kernel").get<std::size_t>();
    arch.stride = j.at("stride").get<std::size_t>();
    return arch;
}

/// Write `<prefix>.json` (manifest) and `<prefix>.bin` (little-endian
/// float32 blob, tensors in manifest order). Offsets and lengths count
/// float32 elements, not bytes.
template <typename T>
void save_checkpoint(const Autoencoder<T>& model, const std::string& prefix) {
    const auto refs = param_refs(model);
    nlohmann::json manifest;
    manifest["version"] = 1;
    manifest["arch"] = arch_to_json(model.arch);
    manifest["seed"] = model.init_seed;

    std::string blob;
    nlohmann::json tensors = nlohmann::json::array();
    std::size_t offset = 0;
    for (std::size_t i = 0; i < refs.size(); ++i) {
        const auto& values = *refs[i].values;
        tensors.push_back({{"name", refs[i].name},
                           {"shape", detail::param_shape(model, i)},
                           {"offset", offset},
                           {"len", values.size()}});
        for (const T& v : values) detail::append_f32le(blob, static_cast<float>(v));
        offset += values.size();
    }
    manifest["tensors"] = std::move(tensors);

    std::ofstream mj(prefix + ".json", std::ios::trunc);
    if (!mj) throw IoFailure("save_checkpoint: cannot write " + prefix + ".json");
    mj << manifest.dump(2) << '\n';
    std::ofstream mb(prefix + ".bin", std::ios::binary | std::ios::trunc);
    if (!mb || !mb.write(blob.data(), static_cast<std::streamsize>(blob.size())))
        throw IoFailure("save_checkpoint: cannot write " + prefix + ".bin");
}

/// Load and validate a checkpoint. Every tensor's shape must match what the
/// declared architecture implies.
template <typename T>
Autoencoder<T> load_checkpoint(const std::string& prefix) {
    std::ifstream mj(prefix + ".json");
    if (!mj) throw IoFailure("load_checkpoint: cannot open " + prefix + ".json");
    nlohmann::json manifest;
    try {
        mj >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw IoFailure("load_checkpoint: bad manifest: " + std::string(e.what()));
    }
    if (manifest.value("version", 0) != 1)
        throw ShapeMismatch("load_checkpoint: unsupported checkpoint version");

    Autoencoder<T> model =
        init_model<T>(manifest.value("seed", std::uint64_t(0)), arch_from_json(manifest.at("arch")));
    auto refs = param_refs(model);
    const auto& tensors = manifest.at("tensors");
    if (tensors.size() != refs.size())
        throw ShapeMismatch("load_checkpoint: tensor count does not match architecture");

    std::ifstream mb(prefix + ".bin", std::ios::binary);
    if (!mb) throw IoFailure("load_checkpoint: cannot open " + prefix + ".bin");
    std::vector<unsigned char> blob((std::istreambuf_iterator<char>(mb)),
                                    std::istreambuf_iterator<char>());

    for (std::size_t i = 0; i < refs.size(); ++i) {
        const auto& entry = tensors[i];
        if (entry.at("name").get<std::string>() != refs[i].name)
            throw ShapeMismatch("load_checkpoint: unexpected tensor " +
                                entry.at("name").get<std::string>());
        const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
        const auto expected = detail::param_shape(model, i);
        if (shape != expected)
            throw ShapeMismatch("load_checkpoint: shape mismatch for " + refs[i].name);
        const auto offset = entry.at("offset").get<std::size_t>();
        const auto len = entry.at("len").get<std::size_t>();
        if (len != refs[i].values->size() || (offset + len) * 4 > blob.size())
            throw ShapeMismatch("load_checkpoint: blob bounds mismatch for " + refs[i].name);
        for (std::size_t j = 0; j < len; ++j)
            (*refs[i].values)[j] = static_cast<T>(detail::read_f32le(&blob[(offset + j) * 4]));
    }
    return model;
}

}  // namespace denoise
