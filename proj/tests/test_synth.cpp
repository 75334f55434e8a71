#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "denoise/stft.hpp"
#include "denoise/synth.hpp"

using namespace denoise;

TEST_CASE("synthetic motor sound is deterministic per seed") {
    SyntheticMotorConfig cfg;
    cfg.rotation_hz = 55.0;
    cfg.seed = 7;
    const Waveform a = synth_motor_sound(cfg);
    const Waveform b = synth_motor_sound(cfg);
    REQUIRE(a.samples == b.samples);

    cfg.seed = 8;
    const Waveform c = synth_motor_sound(cfg);
    REQUIRE(a.samples != c.samples);
}

TEST_CASE("single harmonic is a bounded sine") {
    SyntheticMotorConfig cfg;
    cfg.rotation_hz = 60.0;
    cfg.num_harmonics = 1;
    cfg.harmonic_decay = 1.0;
    cfg.amplitude = 1.0;
    cfg.duration_s = 0.2;
    const Waveform w = synth_motor_sound(cfg);
    REQUIRE(w.size() == 10000);
    for (double s : w.samples) REQUIRE(std::abs(s) <= 1.0 + 1e-12);
}

TEST_CASE("fundamental shows up in the right spectrogram bin") {
    SyntheticMotorConfig cfg;
    cfg.rotation_hz = 60.0;
    cfg.num_harmonics = 3;
    cfg.harmonic_decay = 0.5;
    cfg.duration_s = 0.1;  // 5000 samples
    cfg.seed = 3;
    const Waveform w = synth_motor_sound(cfg);

    const PowerSpectrogram spec = stft_power(w, 4096, 2048, WindowKind::hann);
    REQUIRE(spec.num_frames >= 1);
    std::size_t argmax = 0;
    for (std::size_t k = 1; k < spec.num_bins; ++k)
        if (spec.at(0, k) > spec.at(0, argmax)) argmax = k;
    const double bin_width = 50000.0 / 4096.0;
    REQUIRE(std::abs(spec.bin_hz(argmax) - 60.0) <= bin_width);
}

TEST_CASE("harmonics past Nyquist are rejected") {
    SyntheticMotorConfig cfg;
    cfg.rotation_hz = 7000.0;
    cfg.num_harmonics = 4;  // 28 kHz > 25 kHz Nyquist
    REQUIRE_THROWS_AS(synth_motor_sound(cfg), AliasedHarmonic);
}

TEST_CASE("synthetic signals are band-limited") {
    SyntheticMotorConfig cfg;
    cfg.rotation_hz = 65.0;
    cfg.num_harmonics = 4;
    cfg.harmonic_decay = 0.7;
    cfg.duration_s = 0.2;
    cfg.seed = 11;
    const Waveform w = synth_motor_sound(cfg);

    const std::size_t window = 8192;
    const PowerSpectrogram spec = stft_power(w, window, window, WindowKind::hann);
    const double bin_width = 50000.0 / static_cast<double>(window);
    const double cutoff_hz =
        cfg.rotation_hz * static_cast<double>(cfg.num_harmonics) + 2.0 * bin_width;

    double total = 0.0, above = 0.0;
    for (std::size_t k = 0; k < spec.num_bins; ++k) {
        total += spec.at(0, k);
        if (spec.bin_hz(k) > cutoff_hz) above += spec.at(0, k);
    }
    REQUIRE(above < 0.01 * total);
}
