#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "denoise/tensor.hpp"

namespace denoise {

enum class Activation { none, relu, sigmoid };
enum class Padding { same, valid };

template <typename T>
inline T activate(Activation act, T x) {
    switch (act) {
        case Activation::relu: return x > T(0) ? x : T(0);
        case Activation::sigmoid: return T(1) / (T(1) + std::exp(-x));
        case Activation::none: return x;
    }
    return x;
}

/// Derivative expressed through the post-activation value y = act(x).
/// ReLU'(0) is defined as 0.
template <typename T>
inline T activate_grad_from_output(Activation act, T y) {
    switch (act) {
        case Activation::relu: return y > T(0) ? T(1) : T(0);
        case Activation::sigmoid: return y * (T(1) - y);
        case Activation::none: return T(1);
    }
    return T(1);
}

/// Gradients of one layer: input gradient plus parameter gradients.
template <typename T>
struct LayerGrads {
    Tensor3<T> input;
    std::vector<T> weights;
    std::vector<T> bias;
};

namespace detail {

// Keras-style `same` padding: total = max((out-1)*stride + kernel - in, 0),
// split with the extra sample on the right.
inline std::size_t same_pad_left(std::size_t in_len, std::size_t kernel, std::size_t stride) {
    const std::size_t out_len = (in_len + stride - 1) / stride;
    const std::size_t reach = (out_len - 1) * stride + kernel;
    const std::size_t total = reach > in_len ? reach - in_len : 0;
    return total / 2;
}

}  // namespace detail

/// 1D convolution (cross-correlation, as in every DL framework).
/// weights layout: [kernel][in_channels][out_channels], out fastest.
template <typename T>
struct Conv1d {
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t kernel = 3;
    std::size_t stride = 1;
    Padding padding = Padding::same;
    Activation activation = Activation::none;
    std::vector<T> weights;
    std::vector<T> bias;

    Conv1d() = default;
    Conv1d(std::size_t in_ch, std::size_t out_ch, std::size_t k, std::size_t s, Padding p,
           Activation a)
        : in_channels(in_ch), out_channels(out_ch), kernel(k), stride(s), padding(p),
          activation(a), weights(k * in_ch * out_ch, T(0)), bias(out_ch, T(0)) {}

    T& w(std::size_t k, std::size_t c, std::size_t o) {
        return weights[(k * in_channels + c) * out_channels + o];
    }
    T w(std::size_t k, std::size_t c, std::size_t o) const {
        return weights[(k * in_channels + c) * out_channels + o];
    }

    std::size_t out_length(std::size_t in_len) const {
        if (padding == Padding::same) return (in_len + stride - 1) / stride;
        if (in_len < kernel)
            throw ShapeMismatch("conv1d: input shorter than the kernel under valid padding");
        return (in_len - kernel) / stride + 1;
    }

    std::size_t pad_left(std::size_t in_len) const {
        return padding == Padding::same ? detail::same_pad_left(in_len, kernel, stride) : 0;
    }

    Tensor3<T> forward(const Tensor3<T>& x) const {
        if (x.channels != in_channels)
            throw ChannelMismatch("conv1d: input has " + std::to_string(x.channels) +
                                  " channels, layer expects " + std::to_string(in_channels));
        const std::size_t out_len = out_length(x.length);
        const std::size_t pad = pad_left(x.length);
        Tensor3<T> y(x.batch, out_len, out_channels);

        for (std::size_t b = 0; b < x.batch; ++b) {
            for (std::size_t t = 0; t < out_len; ++t) {
                T* yrow = &y.data[(b * out_len + t) * out_channels];
                for (std::size_t o = 0; o < out_channels; ++o) yrow[o] = bias[o];
                for (std::size_t k = 0; k < kernel; ++k) {
                    const std::ptrdiff_t xi =
                        static_cast<std::ptrdiff_t>(stride * t + k) - static_cast<std::ptrdiff_t>(pad);
                    if (xi < 0 || xi >= static_cast<std::ptrdiff_t>(x.length)) continue;
                    const T* xrow = &x.data[(b * x.length + static_cast<std::size_t>(xi)) * in_channels];
                    const T* wk = &weights[k * in_channels * out_channels];
                    for (std::size_t c = 0; c < in_channels; ++c) {
                        const T xv = xrow[c];
                        const T* wc = wk + c * out_channels;
                        for (std::size_t o = 0; o < out_channels; ++o) yrow[o] += wc[o] * xv;
                    }
                }
                for (std::size_t o = 0; o < out_channels; ++o)
                    yrow[o] = activate(activation, yrow[o]);
            }
        }
        return y;
    }

    /// Exact gradients of forward. `y` is the cached post-activation output.
    LayerGrads<T> backward(const Tensor3<T>& x, const Tensor3<T>& y,
                           const Tensor3<T>& grad_out) const {
        if (!grad_out.same_shape(y))
            throw ShapeMismatch("conv1d backward: grad_out does not match forward output");
        const std::size_t out_len = y.length;
        const std::size_t pad = pad_left(x.length);

        LayerGrads<T> g;
        g.input = Tensor3<T>(x.batch, x.length, in_channels);
        g.weights.assign(weights.size(), T(0));
        g.bias.assign(bias.size(), T(0));

        std::vector<T> gpre(out_channels);
        for (std::size_t b = 0; b < x.batch; ++b) {
            for (std::size_t t = 0; t < out_len; ++t) {
                const T* yrow = &y.data[(b * out_len + t) * out_channels];
                const T* gorow = &grad_out.data[(b * out_len + t) * out_channels];
                // grad through the activation
                for (std::size_t o = 0; o < out_channels; ++o) {
                    gpre[o] = gorow[o] * activate_grad_from_output(activation, yrow[o]);
                    g.bias[o] += gpre[o];
                }
                for (std::size_t k = 0; k < kernel; ++k) {
                    const std::ptrdiff_t xi =
                        static_cast<std::ptrdiff_t>(stride * t + k) - static_cast<std::ptrdiff_t>(pad);
                    if (xi < 0 || xi >= static_cast<std::ptrdiff_t>(x.length)) continue;
                    const T* xrow = &x.data[(b * x.length + static_cast<std::size_t>(xi)) * in_channels];
                    T* gxrow = &g.input.data[(b * x.length + static_cast<std::size_t>(xi)) * in_channels];
                    for (std::size_t c = 0; c < in_channels; ++c) {
                        const T xv = xrow[c];
                        const T* wc = &weights[(k * in_channels + c) * out_channels];
                        T* gwc = &g.weights[(k * in_channels + c) * out_channels];
                        T acc = T(0);
                        for (std::size_t o = 0; o < out_channels; ++o) {
                            gwc[o] += gpre[o] * xv;
                            acc += wc[o] * gpre[o];
                        }
                        gxrow[c] += acc;
                    }
                }
            }
        }
        return g;
    }
};

/// Fractionally-strided (transposed) 1D convolution: the exact adjoint of
/// Conv1d's linear map. Output length = stride * input length.
/// weights layout: [kernel][out_channels][in_channels], in fastest — the
/// same array shape as the Conv1d it is adjoint to.
template <typename T>
struct Conv1dTranspose {
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t kernel = 3;
    std::size_t stride = 1;
    Activation activation = Activation::none;
    std::vector<T> weights;
    std::vector<T> bias;

    Conv1dTranspose() = default;
    Conv1dTranspose(std::size_t in_ch, std::size_t out_ch, std::size_t k, std::size_t s,
                    Activation a)
        : in_channels(in_ch), out_channels(out_ch), kernel(k), stride(s), activation(a),
          weights(k * out_ch * in_ch, T(0)), bias(out_ch, T(0)) {}

    T& w(std::size_t k, std::size_t o, std::size_t c) {
        return weights[(k * out_channels + o) * in_channels + c];
    }
    T w(std::size_t k, std::size_t o, std::size_t c) const {
        return weights[(k * out_channels + o) * in_channels + c];
    }

    std::size_t out_length(std::size_t in_len) const { return in_len * stride; }

    // Matches the `same` pad of the conv this layer is the adjoint of.
    std::size_t pad_left() const {
        return kernel > stride ? (kernel - stride) / 2 : 0;
    }

    Tensor3<T> forward(const Tensor3<T>& x) const {
        if (x.channels != in_channels)
            throw ChannelMismatch("conv1d_transpose: input has " + std::to_string(x.channels) +
                                  " channels, layer expects " + std::to_string(in_channels));
        const std::size_t out_len = out_length(x.length);
        const std::size_t pad = pad_left();
        Tensor3<T> y(x.batch, out_len, out_channels);

        for (std::size_t b = 0; b < x.batch; ++b) {
            for (std::size_t t = 0; t < x.length; ++t) {
                const T* xrow = &x.data[(b * x.length + t) * in_channels];
                for (std::size_t k = 0; k < kernel; ++k) {
                    const std::ptrdiff_t yi =
                        static_cast<std::ptrdiff_t>(stride * t + k) - static_cast<std::ptrdiff_t>(pad);
                    if (yi < 0 || yi >= static_cast<std::ptrdiff_t>(out_len)) continue;
                    T* yrow = &y.data[(b * out_len + static_cast<std::size_t>(yi)) * out_channels];
                    const T* wk = &weights[k * out_channels * in_channels];
                    for (std::size_t o = 0; o < out_channels; ++o) {
                        const T* wo = wk + o * in_channels;
                        T acc = T(0);
                        for (std::size_t c = 0; c < in_channels; ++c) acc += wo[c] * xrow[c];
                        yrow[o] += acc;
                    }
                }
            }
            for (std::size_t t = 0; t < out_len; ++t) {
                T* yrow = &y.data[(b * out_len + t) * out_channels];
                for (std::size_t o = 0; o < out_channels; ++o)
                    yrow[o] = activate(activation, yrow[o] + bias[o]);
            }
        }
        return y;
    }

    LayerGrads<T> backward(const Tensor3<T>& x, const Tensor3<T>& y,
                           const Tensor3<T>& grad_out) const {
        if (!grad_out.same_shape(y))
            throw ShapeMismatch("conv1d_transpose backward: grad_out does not match forward output");
        const std::size_t out_len = y.length;
        const std::size_t pad = pad_left();

        LayerGrads<T> g;
        g.input = Tensor3<T>(x.batch, x.length, in_channels);
        g.weights.assign(weights.size(), T(0));
        g.bias.assign(bias.size(), T(0));

        // Pre-activation gradient, then scatter back through the adjoint map.
        Tensor3<T> gpre(y.batch, out_len, out_channels);
        for (std::size_t i = 0; i < y.data.size(); ++i)
            gpre.data[i] = grad_out.data[i] *
                           activate_grad_from_output(activation, y.data[i]);
        for (std::size_t b = 0; b < y.batch; ++b)
            for (std::size_t t = 0; t < out_len; ++t)
                for (std::size_t o = 0; o < out_channels; ++o)
                    g.bias[o] += gpre.at(b, t, o);

        for (std::size_t b = 0; b < x.batch; ++b) {
            for (std::size_t t = 0; t < x.length; ++t) {
                const T* xrow = &x.data[(b * x.length + t) * in_channels];
                T* gxrow = &g.input.data[(b * x.length + t) * in_channels];
                for (std::size_t k = 0; k < kernel; ++k) {
                    const std::ptrdiff_t yi =
                        static_cast<std::ptrdiff_t>(stride * t + k) - static_cast<std::ptrdiff_t>(pad);
                    if (yi < 0 || yi >= static_cast<std::ptrdiff_t>(out_len)) continue;
                    const T* grow = &gpre.data[(b * out_len + static_cast<std::size_t>(yi)) * out_channels];
                    const T* wk = &weights[k * out_channels * in_channels];
                    T* gwk = &g.weights[k * out_channels * in_channels];
                    for (std::size_t o = 0; o < out_channels; ++o) {
                        const T go = grow[o];
                        const T* wo = wk + o * in_channels;
                        T* gwo = gwk + o * in_channels;
                        for (std::size_t c = 0; c < in_channels; ++c) {
                            gwo[c] += go * xrow[c];
                            gxrow[c] += wo[c] * go;
                        }
                    }
                }
            }
        }
        return g;
    }
};

/// Project each output unit's weight vector onto the L2 ball of the given
/// radius; vectors already inside (and the zero vector) are untouched.
/// `unit_count` units, each owning `fan_in` consecutive strided entries —
/// callers use the overloads below.
template <typename T>
void max_norm_rows(std::vector<T>& weights, std::size_t unit_count, std::size_t unit_stride,
                   std::size_t fan_stride, std::size_t fan_count, double max_norm) {
    for (std::size_t u = 0; u < unit_count; ++u) {
        double sq = 0.0;
        for (std::size_t f = 0; f < fan_count; ++f) {
            const double v = static_cast<double>(weights[u * unit_stride + f * fan_stride]);
            sq += v * v;
        }
        const double norm = std::sqrt(sq);
        if (norm > max_norm) {
            const T scale = static_cast<T>(max_norm / norm);
            for (std::size_t f = 0; f < fan_count; ++f)
                weights[u * unit_stride + f * fan_stride] *= scale;
        }
    }
}

/// Max-norm over a Conv1d: unit o owns w[k][c][o] for all (k, c).
template <typename T>
void apply_max_norm(Conv1d<T>& layer, double max_norm) {
    max_norm_rows(layer.weights, layer.out_channels, /*unit_stride=*/1,
                  /*fan_stride=*/layer.out_channels,
                  /*fan_count=*/layer.kernel * layer.in_channels, max_norm);
}

/// Max-norm over a Conv1dTranspose: unit o owns w[k][o][c] for all (k, c).
template <typename T>
void apply_max_norm(Conv1dTranspose<T>& layer, double max_norm) {
    // Units are not contiguous across k; project per (k-slice, unit) union.
    const std::size_t ic = layer.in_channels;
    const std::size_t oc = layer.out_channels;
    for (std::size_t o = 0; o < oc; ++o) {
        double sq = 0.0;
        for (std::size_t k = 0; k < layer.kernel; ++k)
            for (std::size_t c = 0; c < ic; ++c) {
                const double v = static_cast<double>(layer.w(k, o, c));
                sq += v * v;
            }
        const double norm = std::sqrt(sq);
        if (norm > max_norm) {
            const T scale = static_cast<T>(max_norm / norm);
            for (std::size_t k = 0; k < layer.kernel; ++k)
                for (std::size_t c = 0; c < ic; ++c) layer.w(k, o, c) *= scale;
        }
    }
}

}  // namespace denoise
