#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "denoise/errors.hpp"
#include "denoise/stft.hpp"

namespace denoise {

/// CSV matrix: one row per frame, bins comma-separated.
inline void write_spectrogram_csv(const PowerSpectrogram& spec, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoFailure("write_spectrogram_csv: cannot open " + path);
    out.precision(9);
    for (std::size_t t = 0; t < spec.num_frames; ++t) {
        for (std::size_t k = 0; k < spec.num_bins; ++k) {
            if (k) out << ',';
            out << spec.at(t, k);
        }
        out << '\n';
    }
    if (!out) throw IoFailure("write_spectrogram_csv: write failed: " + path);
}

/// 8-bit grayscale PGM (binary P5): log-power, min-max scaled per image.
/// Rows are bins (low frequency at the bottom row), columns are frames.
inline void write_spectrogram_pgm(const PowerSpectrogram& spec, const std::string& path) {
    const double floor_power = 1e-12;
    std::vector<double> logp(spec.power.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.power.size(); ++i) {
        logp[i] = std::log10(spec.power[i] + floor_power);
        lo = std::min(lo, logp[i]);
        hi = std::max(hi, logp[i]);
    }
    const double span = hi > lo ? hi - lo : 1.0;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("write_spectrogram_pgm: cannot open " + path);
    out << "P5\n" << spec.num_frames << ' ' << spec.num_bins << "\n255\n";
    for (std::size_t row = 0; row < spec.num_bins; ++row) {
        const std::size_t bin = spec.num_bins - 1 - row;
        for (std::size_t t = 0; t < spec.num_frames; ++t) {
            const double v = (logp[t * spec.num_bins + bin] - lo) / span;
            out.put(static_cast<char>(std::lrint(v * 255.0)));
        }
    }
    if (!out) throw IoFailure("write_spectrogram_pgm: write failed: " + path);
}

}  // namespace denoise
