#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "denoise/layers.hpp"
#include "denoise/rng.hpp"
#include "denoise/tensor.hpp"

namespace denoise {

/// Channel plan of the convolutional autoencoder. Encoder layers downsample
/// by `stride` each, decoder transpose layers upsample by the same factor,
/// and a final stride-1 sigmoid conv maps back to one channel.
struct Architecture {
    std::vector<std::size_t> encoder_channels;
    std::vector<std::size_t> decoder_channels;
    std::size_t kernel = 3;
    std::size_t stride = 2;

    /// Input lengths must be divisible by this (stride^depth).
    std::size_t length_multiple() const {
        std::size_t m = 1;
        for (std::size_t i = 0; i < encoder_channels.size(); ++i) m *= stride;
        return m;
    }

    /// The architecture from the target pipeline: 128/32/16/8 encoder,
    /// mirrored decoder, kernel 3.
    static Architecture full_scale() {
        return Architecture{{128, 32, 16, 8}, {8, 16, 32, 128}, 3, 2};
    }

    /// Reduced desk-scale variant: 16/8/4/2 mirrored.
    static Architecture desk_scale() {
        return Architecture{{16, 8, 4, 2}, {2, 4, 8, 16}, 3, 2};
    }

    bool operator==(const Architecture&) const = default;
};

template <typename T>
struct Autoencoder {
    Architecture arch;
    std::vector<Conv1d<T>> encoder;
    std::vector<Conv1dTranspose<T>> decoder;
    Conv1d<T> head;
    std::uint64_t init_seed = 0;
};

/// Named handle onto one parameter tensor, in canonical order. The order is
/// the contract for optimizer state, gradients, and checkpoints.
template <typename T>
struct ParamRef {
    std::string name;
    std::vector<T>* values;
};

template <typename T>
std::vector<ParamRef<T>> param_refs(Autoencoder<T>& model) {
    std::vector<ParamRef<T>> refs;
    for (std::size_t i = 0; i < model.encoder.size(); ++i) {
        refs.push_back({"encoder." + std::to_string(i) + ".weights", &model.encoder[i].weights});
        refs.push_back({"encoder." + std::to_string(i) + ".bias", &model.encoder[i].bias});
    }
    for (std::size_t i = 0; i < model.decoder.size(); ++i) {
        refs.push_back({"decoder." + std::to_string(i) + ".weights", &model.decoder[i].weights});
        refs.push_back({"decoder." + std::to_string(i) + ".bias", &model.decoder[i].bias});
    }
    refs.push_back({"head.weights", &model.head.weights});
    refs.push_back({"head.bias", &model.head.bias});
    return refs;
}

/// Read-only view of the same tensors, same canonical order.
template <typename T>
struct ConstParamRef {
    std::string name;
    const std::vector<T>* values;
};

template <typename T>
std::vector<ConstParamRef<T>> param_refs(const Autoencoder<T>& model) {
    auto refs = param_refs(const_cast<Autoencoder<T>&>(model));
    std::vector<ConstParamRef<T>> out;
    out.reserve(refs.size());
    for (auto& r : refs) out.push_back({std::move(r.name), r.values});
    return out;
}

/// Parameter gradients, aligned index-for-index with param_refs().
template <typename T>
struct ModelGrads {
    std::vector<std::vector<T>> tensors;

    void add(const ModelGrads& other) {
        for (std::size_t i = 0; i < tensors.size(); ++i)
            for (std::size_t j = 0; j < tensors[i].size(); ++j)
                tensors[i][j] += other.tensors[i][j];
    }
};

namespace detail {

template <typename T>
void glorot_fill(std::vector<T>& weights, std::size_t fan_in, std::size_t fan_out,
                 CounterRng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (T& v : weights)
        v = static_cast<T>((rng.next_uniform() * 2.0 - 1.0) * limit);
}

}  // namespace detail

/// Build the autoencoder with Glorot-uniform weights (fan counts include the
/// kernel size) and zero biases. Deterministic per seed.
template <typename T>
Autoencoder<T> init_model(std::uint64_t seed, const Architecture& arch) {
    Autoencoder<T> model;
    model.arch = arch;
    model.init_seed = seed;

    std::size_t layer_index = 0;
    auto layer_rng = [&]() { return CounterRng(stable_hash(seed, "layer." + std::to_string(layer_index++))); };

    std::size_t in_ch = 1;
    for (std::size_t out_ch : arch.encoder_channels) {
        Conv1d<T> layer(in_ch, out_ch, arch.kernel, arch.stride, Padding::same, Activation::relu);
        CounterRng rng = layer_rng();
        detail::glorot_fill(layer.weights, arch.kernel * in_ch, arch.kernel * out_ch, rng);
        model.encoder.push_back(std::move(layer));
        in_ch = out_ch;
    }
    for (std::size_t out_ch : arch.decoder_channels) {
        Conv1dTranspose<T> layer(in_ch, out_ch, arch.kernel, arch.stride, Activation::relu);
        CounterRng rng = layer_rng();
        detail::glorot_fill(layer.weights, arch.kernel * in_ch, arch.kernel * out_ch, rng);
        model.decoder.push_back(std::move(layer));
        in_ch = out_ch;
    }
    model.head = Conv1d<T>(in_ch, 1, arch.kernel, 1, Padding::same, Activation::sigmoid);
    CounterRng rng = layer_rng();
    detail::glorot_fill(model.head.weights, arch.kernel * in_ch, arch.kernel * 1, rng);
    return model;
}

/// Per-layer activations retained for the backward pass.
template <typename T>
struct ForwardCache {
    Tensor3<T> input;
    std::vector<Tensor3<T>> encoder_out;
    std::vector<Tensor3<T>> decoder_out;
    Tensor3<T> output;  // head output, in (0,1)
};

template <typename T>
ForwardCache<T> model_forward(const Autoencoder<T>& model, const Tensor3<T>& x) {
    if (x.channels != 1)
        throw ChannelMismatch("model_forward: input must have exactly one channel");
    const std::size_t multiple = model.arch.length_multiple();
    if (x.length == 0 || x.length % multiple != 0)
        throw LengthNotDivisible("model_forward: input length " + std::to_string(x.length) +
                                 " not divisible by " + std::to_string(multiple));

    ForwardCache<T> cache;
    cache.input = x;
    const Tensor3<T>* cur = &cache.input;
    for (const auto& layer : model.encoder) {
        cache.encoder_out.push_back(layer.forward(*cur));
        cur = &cache.encoder_out.back();
    }
    for (const auto& layer : model.decoder) {
        cache.decoder_out.push_back(layer.forward(*cur));
        cur = &cache.decoder_out.back();
    }
    cache.output = model.head.forward(*cur);
    return cache;
}

/// Gradients for every parameter given d(loss)/d(output). The cache must
/// come from a forward pass of this model on the same input.
template <typename T>
ModelGrads<T> model_backward(const Autoencoder<T>& model, const ForwardCache<T>& cache,
                             const Tensor3<T>& grad_output) {
    if (cache.encoder_out.size() != model.encoder.size() ||
        cache.decoder_out.size() != model.decoder.size())
        throw StaleCache("model_backward: cache does not match model topology");
    if (!grad_output.same_shape(cache.output))
        throw StaleCache("model_backward: grad_output shape does not match cached forward");

    const std::size_t n_enc = model.encoder.size();
    const std::size_t n_dec = model.decoder.size();
    ModelGrads<T> grads;
    grads.tensors.resize(2 * (n_enc + n_dec) + 2);

    const Tensor3<T>& head_in =
        n_dec > 0 ? cache.decoder_out.back()
                  : (n_enc > 0 ? cache.encoder_out.back() : cache.input);
    LayerGrads<T> g = model.head.backward(head_in, cache.output, grad_output);
    grads.tensors[2 * (n_enc + n_dec)] = std::move(g.weights);
    grads.tensors[2 * (n_enc + n_dec) + 1] = std::move(g.bias);

    Tensor3<T> grad = std::move(g.input);
    for (std::size_t i = n_dec; i-- > 0;) {
        const Tensor3<T>& in =
            i > 0 ? cache.decoder_out[i - 1]
                  : (n_enc > 0 ? cache.encoder_out.back() : cache.input);
        g = model.decoder[i].backward(in, cache.decoder_out[i], grad);
        grads.tensors[2 * (n_enc + i)] = std::move(g.weights);
        grads.tensors[2 * (n_enc + i) + 1] = std::move(g.bias);
        grad = std::move(g.input);
    }
    for (std::size_t i = n_enc; i-- > 0;) {
        const Tensor3<T>& in = i > 0 ? cache.encoder_out[i - 1] : cache.input;
        g = model.encoder[i].backward(in, cache.encoder_out[i], grad);
        grads.tensors[2 * i] = std::move(g.weights);
        grads.tensors[2 * i + 1] = std::move(g.bias);
        grad = std::move(g.input);
    }
    return grads;
}

template <typename T>
void apply_max_norm(Autoencoder<T>& model, double max_norm) {
    for (auto& layer : model.encoder) apply_max_norm(layer, max_norm);
    for (auto& layer : model.decoder) apply_max_norm(layer, max_norm);
    apply_max_norm(model.head, max_norm);
}

/// Largest per-output-unit L2 weight norm across the whole model.
template <typename T>
double max_unit_norm(const Autoencoder<T>& model) {
    double worst = 0.0;
    auto conv_norms = [&](const Conv1d<T>& layer) {
        for (std::size_t o = 0; o < layer.out_channels; ++o) {
            double sq = 0.0;
            for (std::size_t k = 0; k < layer.kernel; ++k)
                for (std::size_t c = 0; c < layer.in_channels; ++c) {
                    const double v = static_cast<double>(layer.w(k, c, o));
                    sq += v * v;
                }
            worst = std::max(worst, std::sqrt(sq));
        }
    };
    auto tconv_norms = [&](const Conv1dTranspose<T>& layer) {
        for (std::size_t o = 0; o < layer.out_channels; ++o) {
            double sq = 0.0;
            for (std::size_t k = 0; k < layer.kernel; ++k)
                for (std::size_t c = 0; c < layer.in_channels; ++c) {
                    const double v = static_cast<double>(layer.w(k, o, c));
                    sq += v * v;
                }
            worst = std::max(worst, std::sqrt(sq));
        }
    };
    for (const auto& layer : model.encoder) conv_norms(layer);
    for (const auto& layer : model.decoder) tconv_norms(layer);
    conv_norms(model.head);
    return worst;
}

}  // namespace denoise
