#pragma once

#include <cmath>
#include <cstdint>

#include "denoise/errors.hpp"
#include "denoise/rng.hpp"
#include "denoise/waveform.hpp"

namespace denoise {

/// Desk-scale stand-in for a motor recording: a harmonic stack on a
/// rotation fundamental with seeded random phases.
struct SyntheticMotorConfig {
    double rotation_hz = 60.0;
    std::size_t num_harmonics = 4;
    double harmonic_decay = 0.6;  // amplitude ratio between consecutive harmonics
    double duration_s = 0.5;
    std::uint32_t sample_rate_hz = 50000;
    double amplitude = 1.0;
    std::uint64_t seed = 0;
};

inline Waveform synth_motor_sound(const SyntheticMotorConfig& cfg) {
    if (cfg.num_harmonics < 1 || cfg.harmonic_decay <= 0.0 || cfg.harmonic_decay > 1.0 ||
        cfg.duration_s <= 0.0 || cfg.amplitude <= 0.0)
        throw Error("synth_motor_sound: invalid config");
    if (cfg.rotation_hz * static_cast<double>(cfg.num_harmonics) >= cfg.sample_rate_hz / 2.0)
        throw AliasedHarmonic("synth_motor_sound: harmonics reach past Nyquist");

    const double two_pi = 2.0 * 3.14159265358979323846;
    const auto length = static_cast<std::size_t>(cfg.duration_s * cfg.sample_rate_hz);

    CounterRng rng(cfg.seed);
    std::vector<double> phases(cfg.num_harmonics);
    for (auto& p : phases) p = rng.next_uniform() * two_pi;

    Waveform w;
    w.sample_rate_hz = cfg.sample_rate_hz;
    w.samples.assign(length, 0.0);
    double gain = cfg.amplitude;
    for (std::size_t h = 0; h < cfg.num_harmonics; ++h) {
        const double f = cfg.rotation_hz * static_cast<double>(h + 1);
        for (std::size_t t = 0; t < length; ++t)
            w.samples[t] += gain * std::sin(two_pi * f * t / cfg.sample_rate_hz + phases[h]);
        gain *= cfg.harmonic_decay;
    }
    return w;
}

}  // namespace denoise
