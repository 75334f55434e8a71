#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "denoise/errors.hpp"
#include "denoise/fft.hpp"
#include "denoise/rng.hpp"
#include "denoise/wav_io.hpp"
#include "denoise/waveform.hpp"

namespace denoise {

enum class NoiseKind { gaussian, blue, file };

inline std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::blue: return "blue";
        case NoiseKind::file: return "file";
    }
    return "gaussian";
}

inline NoiseKind noise_kind_from_string(const std::string& s) {
    if (s == "gaussian") return NoiseKind::gaussian;
    if (s == "blue") return NoiseKind::blue;
    if (s == "file") return NoiseKind::file;
    throw Error("unknown noise kind: " + s);
}

/// A corruption recipe: which noise, how strong, and which seed stream.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double noise_factor = 0.1;
    std::uint64_t seed = 0;
    std::optional<std::string> file_path;

    nlohmann::json to_json() const {
        nlohmann::json j{{"kind", to_string(kind)}, {"factor", noise_factor}, {"seed", seed}};
        if (file_path) j["path"] = *file_path;
        return j;
    }

    static NoiseSpec from_json(const nlohmann::json& j) {
        NoiseSpec spec;
        spec.kind = noise_kind_from_string(j.at("kind").get<std::string>());
        spec.noise_factor = j.at("factor").get<double>();
        spec.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("path")) spec.file_path = j.at("path").get<std::string>();
        if (spec.kind == NoiseKind::file && !spec.file_path)
            throw Error("noise spec: kind 'file' requires a path");
        return spec;
    }
};

/// I.i.d. N(0,1) samples via the Box-Muller transform over the counter-based
/// uniform stream, so identical seeds reproduce bit-identical noise on any
/// platform.
inline Waveform gaussian_noise(std::size_t length, std::uint64_t seed,
                               std::uint32_t sample_rate_hz = 50000) {
    if (length < 1) throw ShapeMismatch("gaussian_noise: length must be >= 1");
    Waveform w;
    w.sample_rate_hz = sample_rate_hz;
    w.samples.resize(length);
    const CounterRng rng(seed);
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (std::size_t i = 0; i < length; i += 2) {
        // u1 in (0,1] keeps the log finite.
        const double u1 = 1.0 - rng.uniform_at(i);
        const double u2 = rng.uniform_at(i + 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        w.samples[i] = r * std::cos(two_pi * u2);
        if (i + 1 < length) w.samples[i + 1] = r * std::sin(two_pi * u2);
    }
    return w;
}

/// Blue noise: white Gaussian noise shaped in the frequency domain by a
/// sqrt(f) gain (power grows proportionally to frequency), DC zeroed,
/// inverse-transformed and rescaled to unit sample variance. Arbitrary
/// lengths are cut from the next power-of-two synthesis buffer.
inline Waveform blue_noise(std::size_t length, std::uint32_t sample_rate_hz, std::uint64_t seed) {
    if (length < 16) throw ShapeMismatch("blue_noise: length must be >= 16");
    const std::size_t n = next_power_of_two(length);

    const Waveform white = gaussian_noise(n, seed, sample_rate_hz);
    std::vector<std::complex<double>> spectrum(white.samples.begin(), white.samples.end());
    fft_inplace(spectrum);

    spectrum[0] = 0.0;  // no DC
    const double rate = static_cast<double>(sample_rate_hz);
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double f = static_cast<double>(k) * rate / static_cast<double>(n);
        const double gain = std::sqrt(f);
        spectrum[k] *= gain;
        if (k != n / 2) spectrum[n - k] *= gain;  // keep Hermitian symmetry
    }
    fft_inplace(spectrum, /*inverse=*/true);

    Waveform w;
    w.sample_rate_hz = sample_rate_hz;
    w.samples.resize(length);
    for (std::size_t i = 0; i < length; ++i) w.samples[i] = spectrum[i].real();

    double mean = 0.0;
    for (double s : w.samples) mean += s;
    mean /= static_cast<double>(length);
    double var = 0.0;
    for (double s : w.samples) var += (s - mean) * (s - mean);
    var /= static_cast<double>(length);
    const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    for (double& s : w.samples) s *= scale;
    return w;
}

/// Load recorded noise: mono-mix, decimate-by-averaging when the file rate
/// is an integer multiple of the target rate, then trim or loop cyclically
/// to the target length.
inline Waveform load_noise(const std::string& path, std::size_t target_length,
                           std::uint32_t target_rate_hz) {
    const WavData wav = read_wav(path);
    Waveform mono = wav.to_mono();
    if (mono.samples.empty()) throw IoFailure("load_noise: empty file: " + path);

    if (mono.sample_rate_hz != target_rate_hz) {
        if (mono.sample_rate_hz % target_rate_hz != 0)
            throw UnsupportedRate("load_noise: " + std::to_string(mono.sample_rate_hz) +
                                  " Hz is not an integer multiple of " +
                                  std::to_string(target_rate_hz) + " Hz");
        const std::size_t factor = mono.sample_rate_hz / target_rate_hz;
        std::vector<double> decimated(mono.samples.size() / factor);
        for (std::size_t i = 0; i < decimated.size(); ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < factor; ++j) acc += mono.samples[i * factor + j];
            decimated[i] = acc / static_cast<double>(factor);
        }
        mono.samples = std::move(decimated);
        mono.sample_rate_hz = target_rate_hz;
        if (mono.samples.empty())
            throw IoFailure("load_noise: file too short after decimation: " + path);
    }

    Waveform out;
    out.sample_rate_hz = target_rate_hz;
    out.samples.resize(target_length);
    for (std::size_t i = 0; i < target_length; ++i)
        out.samples[i] = mono.samples[i % mono.samples.size()];
    return out;
}

/// Additive corruption: out[i] = clean[i] + noise_factor * noise[i].
inline Waveform corrupt(const Waveform& clean, const Waveform& noise, double noise_factor) {
    if (clean.size() != noise.size())
        throw LengthMismatch("corrupt: clean and noise lengths differ");
    if (clean.sample_rate_hz != noise.sample_rate_hz)
        throw RateMismatch("corrupt: clean and noise sample rates differ");
    Waveform out;
    out.sample_rate_hz = clean.sample_rate_hz;
    out.samples.resize(clean.size());
    for (std::size_t i = 0; i < clean.size(); ++i)
        out.samples[i] = clean.samples[i] + noise_factor * noise.samples[i];
    return out;
}

/// Render the noise a recipe describes for one signal; `per_file_seed` is
/// the already-derived seed for this signal.
inline Waveform render_noise(const NoiseSpec& spec, std::uint64_t per_file_seed,
                             std::size_t length, std::uint32_t sample_rate_hz) {
    switch (spec.kind) {
        case NoiseKind::gaussian: return gaussian_noise(length, per_file_seed, sample_rate_hz);
        case NoiseKind::blue: return blue_noise(length, sample_rate_hz, per_file_seed);
        case NoiseKind::file:
            if (!spec.file_path) throw Error("render_noise: file kind without a path");
            return load_noise(*spec.file_path, length, sample_rate_hz);
    }
    throw Error("render_noise: unreachable");
}

}  // namespace denoise
