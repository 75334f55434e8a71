#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "denoise/fft.hpp"
#include "denoise/waveform.hpp"

namespace denoise {

enum class WindowKind { hann, rectangular };

/// Magnitude-squared STFT frames. Entry (t, k) = |FFT(window * frame_t)[k]|^2
/// for k in [0, window_size/2]; no FFT normalization is applied (the scaling
/// convention is pinned by test).
struct PowerSpectrogram {
    std::vector<double> power;  // num_frames x num_bins, row-major
    std::size_t num_frames = 0;
    std::size_t num_bins = 0;
    std::size_t window_size = 0;
    std::size_t hop = 0;
    std::uint32_t sample_rate_hz = 0;
    WindowKind window_kind = WindowKind::hann;

    double at(std::size_t frame, std::size_t bin) const {
        return power[frame * num_bins + bin];
    }

    /// Center frequency of a bin in Hz.
    double bin_hz(std::size_t bin) const {
        return static_cast<double>(bin) * sample_rate_hz / static_cast<double>(window_size);
    }
};

inline std::vector<double> make_window(WindowKind kind, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (kind == WindowKind::hann) {
        // Periodic Hann.
        for (std::size_t i = 0; i < n; ++i)
            w[i] = 0.5 * (1.0 - std::cos(2.0 * 3.14159265358979323846 * static_cast<double>(i) /
                                         static_cast<double>(n)));
    }
    return w;
}

constexpr std::size_t kDefaultStftWindow = 1024;
constexpr std::size_t kDefaultStftHop = 512;

inline PowerSpectrogram stft_power(const Waveform& w, std::size_t window_size = kDefaultStftWindow,
                                   std::size_t hop = kDefaultStftHop,
                                   WindowKind kind = WindowKind::hann) {
    if (w.size() < window_size)
        throw SignalTooShort("stft_power: signal shorter than window");
    if (hop < 1) throw ShapeMismatch("stft_power: hop must be >= 1");
    if (!is_power_of_two(window_size))
        throw ShapeMismatch("stft_power: window size must be a power of two");

    PowerSpectrogram out;
    out.window_size = window_size;
    out.hop = hop;
    out.sample_rate_hz = w.sample_rate_hz;
    out.window_kind = kind;
    out.num_bins = window_size / 2 + 1;
    out.num_frames = (w.size() - window_size) / hop + 1;
    out.power.resize(out.num_frames * out.num_bins);

    const std::vector<double> win = make_window(kind, window_size);
    std::vector<std::complex<double>> frame(window_size);
    for (std::size_t t = 0; t < out.num_frames; ++t) {
        const std::size_t start = t * hop;
        for (std::size_t i = 0; i < window_size; ++i)
            frame[i] = std::complex<double>(w.samples[start + i] * win[i], 0.0);
        fft_inplace(frame);
        for (std::size_t k = 0; k < out.num_bins; ++k)
            out.power[t * out.num_bins + k] = std::norm(frame[k]);
    }
    return out;
}

}  // namespace denoise
