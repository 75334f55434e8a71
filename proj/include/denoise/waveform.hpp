#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "denoise/errors.hpp"

namespace denoise {

/// A finite real-valued sampled signal. The universal currency between
/// modules: raw sensor amplitudes plus the rate they were sampled at.
struct Waveform {
    std::vector<double> samples;
    std::uint32_t sample_rate_hz = 0;

    Waveform() = default;
    Waveform(std::vector<double> s, std::uint32_t rate)
        : samples(std::move(s)), sample_rate_hz(rate) {}

    std::size_t size() const { return samples.size(); }
    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }

    bool valid() const {
        if (samples.empty() || sample_rate_hz == 0) return false;
        return std::all_of(samples.begin(), samples.end(),
                           [](double v) { return std::isfinite(v); });
    }
};

/// The min/max needed to invert min-max normalization.
struct NormParams {
    double min_val = 0.0;
    double max_val = 1.0;
};

/// A [0,1]-scaled signal plus the parameters that produced it. The source
/// min maps exactly to 0 and the source max exactly to 1.
struct NormalizedWaveform {
    std::vector<double> samples;
    std::uint32_t sample_rate_hz = 0;
    NormParams norm;

    std::size_t size() const { return samples.size(); }
};

/// Scale a waveform linearly so its minimum lands on 0 and its maximum on 1.
/// Throws ConstantSignal when max == min (the map is undefined and the
/// caller must not train on such input).
inline NormalizedWaveform minmax_normalize(const Waveform& w) {
    if (!w.valid()) throw Error("minmax_normalize: empty or non-finite waveform");
    const auto [mn_it, mx_it] = std::minmax_element(w.samples.begin(), w.samples.end());
    const double mn = *mn_it;
    const double mx = *mx_it;
    if (!(mx > mn)) throw ConstantSignal("minmax_normalize: constant signal, max == min");

    NormalizedWaveform out;
    out.sample_rate_hz = w.sample_rate_hz;
    out.norm = NormParams{mn, mx};
    out.samples.resize(w.samples.size());
    // Division (not reciprocal-multiply): rounding is monotone, so the
    // result stays inside [0, 1] for every sample.
    const double span = mx - mn;
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        out.samples[i] = (w.samples[i] - mn) / span;
    // Pin the extremal positions exactly onto the interval endpoints.
    out.samples[static_cast<std::size_t>(mn_it - w.samples.begin())] = 0.0;
    out.samples[static_cast<std::size_t>(mx_it - w.samples.begin())] = 1.0;
    return out;
}

/// Invert minmax_normalize using the stored parameters.
inline Waveform denormalize(const NormalizedWaveform& n) {
    Waveform out;
    out.sample_rate_hz = n.sample_rate_hz;
    out.samples.resize(n.samples.size());
    const double span = n.norm.max_val - n.norm.min_val;
    for (std::size_t i = 0; i < n.samples.size(); ++i)
        out.samples[i] = n.samples[i] * span + n.norm.min_val;
    return out;
}

}  // namespace denoise
