#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "denoise/errors.hpp"
#include "denoise/inference.hpp"
#include "denoise/model.hpp"
#include "denoise/spectrogram_io.hpp"
#include "denoise/stft.hpp"
#include "denoise/wav_io.hpp"
#include "denoise/waveform.hpp"

namespace denoise {

/// Mean squared difference over one sound's samples, in the normalized
/// [0,1] domain.
inline double per_sound_mse(const std::vector<double>& clean_norm,
                            const std::vector<double>& denoised) {
    if (clean_norm.size() != denoised.size())
        throw LengthMismatch("per_sound_mse: lengths differ");
    if (clean_norm.empty()) throw LengthMismatch("per_sound_mse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < clean_norm.size(); ++i) {
        const double d = clean_norm[i] - denoised[i];
        acc += d * d;
    }
    return acc / static_cast<double>(clean_norm.size());
}

/// The "how bad is it before denoising" floor: MSE of the normalized noisy
/// input against the normalized clean signal.
inline double baseline_mse(const std::vector<double>& clean_norm,
                           const std::vector<double>& noisy_norm) {
    return per_sound_mse(clean_norm, noisy_norm);
}

struct EvalEntry {
    std::string sound_id;
    double mse_denoised = 0.0;
    double mse_noisy_baseline = 0.0;
    double improvement_ratio = 0.0;  // baseline / max(denoised, 1e-12)
};

struct EvalSummary {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double median = 0.0;
};

struct EvalReport {
    std::vector<EvalEntry> entries;
    EvalSummary summary;  // over mse_denoised
    std::string category;
    std::string noise_kind;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["version"] = 1;
        j["category"] = category;
        j["noise_kind"] = noise_kind;
        j["entries"] = nlohmann::json::array();
        for (const auto& e : entries)
            j["entries"].push_back({{"sound_id", e.sound_id},
                                    {"mse_denoised", e.mse_denoised},
                                    {"mse_noisy_baseline", e.mse_noisy_baseline},
                                    {"improvement_ratio", e.improvement_ratio}});
        j["summary"] = {{"min", summary.min},
                        {"max", summary.max},
                        {"mean", summary.mean},
                        {"median", summary.median}};
        return j;
    }

    static EvalReport from_json(const nlohmann::json& j) {
        EvalReport r;
        r.category = j.at("category").get<std::string>();
        r.noise_kind = j.at("noise_kind").get<std::string>();
        for (const auto& e : j.at("entries"))
            r.entries.push_back({e.at("sound_id").get<std::string>(),
                                 e.at("mse_denoised").get<double>(),
                                 e.at("mse_noisy_baseline").get<double>(),
                                 e.at("improvement_ratio").get<double>()});
        const auto& s = j.at("summary");
        r.summary = {s.at("min").get<double>(), s.at("max").get<double>(),
                     s.at("mean").get<double>(), s.at("median").get<double>()};
        return r;
    }
};

inline double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// One test sound: the clean original and its corrupted counterpart.
struct EvalItem {
    std::string id;
    Waveform clean;
    Waveform noisy;
};

/// Run the trained model over every test sound (windowed inference on the
/// full signal) and collect per-sound denoised and baseline MSE.
template <typename T>
EvalReport evaluate_testset(const Autoencoder<T>& model, const std::vector<EvalItem>& items,
                            const std::string& category, const std::string& noise_kind,
                            std::size_t window_len) {
    if (items.empty()) throw EmptyTestSet("evaluate_testset: empty test set");

    EvalReport report;
    report.category = category;
    report.noise_kind = noise_kind;

    std::vector<double> denoised_mses;
    for (const EvalItem& item : items) {
        const NormalizedWaveform clean_norm = minmax_normalize(item.clean);
        const NormalizedWaveform noisy_norm = minmax_normalize(item.noisy);
        if (clean_norm.size() != noisy_norm.size())
            throw LengthMismatch("evaluate_testset: clean/noisy lengths differ for " + item.id);

        std::vector<T> input(noisy_norm.samples.begin(), noisy_norm.samples.end());
        const std::vector<T> output = denoise_signal(model, input, window_len);
        std::vector<double> denoised(output.begin(), output.end());

        EvalEntry entry;
        entry.sound_id = item.id;
        entry.mse_denoised = per_sound_mse(clean_norm.samples, denoised);
        entry.mse_noisy_baseline = baseline_mse(clean_norm.samples, noisy_norm.samples);
        entry.improvement_ratio =
            entry.mse_noisy_baseline / std::max(entry.mse_denoised, 1e-12);
        denoised_mses.push_back(entry.mse_denoised);
        report.entries.push_back(std::move(entry));
    }

    report.summary.min = *std::min_element(denoised_mses.begin(), denoised_mses.end());
    report.summary.max = *std::max_element(denoised_mses.begin(), denoised_mses.end());
    double mean = 0.0;
    for (double v : denoised_mses) mean += v;
    report.summary.mean = mean / static_cast<double>(denoised_mses.size());
    report.summary.median = median_of(denoised_mses);
    return report;
}

/// Emit <stem>.json and <stem>.csv; CSV rows keep input order.
inline void emit_report(const EvalReport& report, const std::string& stem) {
    std::ofstream js(stem + ".json", std::ios::trunc);
    if (!js) throw IoFailure("emit_report: cannot write " + stem + ".json");
    js << report.to_json().dump(2) << '\n';

    std::ofstream csv(stem + ".csv", std::ios::trunc);
    if (!csv) throw IoFailure("emit_report: cannot write " + stem + ".csv");
    csv << "sound_id,mse_denoised,mse_noisy_baseline,improvement_ratio\n";
    csv.precision(17);
    for (const auto& e : report.entries)
        csv << e.sound_id << ',' << e.mse_denoised << ',' << e.mse_noisy_baseline << ','
            << e.improvement_ratio << '\n';
    if (!csv) throw IoFailure("emit_report: write failed: " + stem + ".csv");
}

/// The figure triptych in machine-readable form: for each of clean, noisy
/// and denoised write a WAV, a spectrogram CSV and a PGM image (nine files).
inline void emit_comparison_bundle(const Waveform& clean, const Waveform& noisy,
                                   const Waveform& denoised, const std::string& out_dir) {
    if (clean.size() != noisy.size() || clean.size() != denoised.size())
        throw LengthMismatch("emit_comparison_bundle: waveform lengths differ");
    std::filesystem::create_directories(out_dir);

    // Shrink the analysis window when the signals are short.
    std::size_t window = kDefaultStftWindow;
    while (window > clean.size()) window /= 2;
    if (window < 2) throw SignalTooShort("emit_comparison_bundle: signals too short for STFT");

    const std::pair<const char*, const Waveform*> parts[] = {
        {"clean", &clean}, {"noisy", &noisy}, {"denoised", &denoised}};
    for (const auto& [name, wave] : parts) {
        const std::filesystem::path base = std::filesystem::path(out_dir) / name;
        write_wav_f32(base.string() + ".wav", *wave);
        const PowerSpectrogram spec = stft_power(*wave, window, window / 2, WindowKind::hann);
        write_spectrogram_csv(spec, base.string() + "_spectrogram.csv");
        write_spectrogram_pgm(spec, base.string() + "_spectrogram.pgm");
    }
}

}  // namespace denoise
