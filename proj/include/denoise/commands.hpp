#pragma once

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "denoise/checkpoint.hpp"
#include "denoise/dataset.hpp"
#include "denoise/errors.hpp"
#include "denoise/evaluate.hpp"
#include "denoise/fetch.hpp"
#include "denoise/inference.hpp"
#include "denoise/manifest.hpp"
#include "denoise/noise.hpp"
#include "denoise/synth.hpp"
#include "denoise/train.hpp"

namespace denoise {

// Stable exit codes; stderr carries diagnostics, stdout machine output.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitNetwork = 10,
    kExitChecksum = 11,
    kExitExtraction = 12,
    kExitPrepare = 20,
    kExitCorrupt = 21,
    kExitNonFiniteLoss = 30,
    kExitEmptySplit = 31,
    kExitCheckpoint = 40,
    kExitDenoiseIo = 41,
    kExitEmptyTestSplit = 50,
};

inline int cmd_fetch(const std::string& url, const std::string& dest,
                     const std::optional<std::string>& checksum) {
    try {
        fetch_dataset(url, dest, checksum);
    } catch (const NetworkFailure& e) {
        std::cerr << e.what() << '\n';
        return kExitNetwork;
    } catch (const ChecksumMismatch& e) {
        std::cerr << e.what() << '\n';
        return kExitChecksum;
    } catch (const ExtractionFailure& e) {
        std::cerr << e.what() << '\n';
        return kExitExtraction;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return kExitNetwork;
    }
    std::cerr << "fetched and extracted " << url << " into " << dest << '\n';
    return kExitOk;
}

/// Convert a CSV tree into a mirrored WAV tree plus a manifest. Per-file
/// failures are logged and the command fails if any file failed.
inline int cmd_prepare(const std::string& dataset_dir, const std::string& out_dir,
                       std::size_t mic_column) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dataset_dir)) {
        std::cerr << "prepare: not a directory: " << dataset_dir << '\n';
        return kExitPrepare;
    }

    std::vector<fs::path> csvs;
    for (const auto& entry : fs::recursive_directory_iterator(dataset_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            csvs.push_back(entry.path());
    std::sort(csvs.begin(), csvs.end());
    if (csvs.empty()) {
        std::cerr << "prepare: no input files under " << dataset_dir << '\n';
        return kExitPrepare;
    }

    CorpusManifest manifest;
    std::size_t failures = 0;
    for (const fs::path& csv : csvs) {
        const fs::path rel = fs::relative(csv, dataset_dir);
        const fs::path wav = fs::path(out_dir) / fs::path(rel).replace_extension(".wav");
        try {
            fs::create_directories(wav.parent_path());
            const MafauldaRecord rec = parse_csv(csv.string());
            if (!rec.standard_length)
                std::cerr << "prepare: " << csv << " has " << rec.num_samples
                          << " rows (expected 250000); accepting\n";
            write_wav_f32(wav.string(), extract_microphone(rec, mic_column));

            ManifestFile f;
            f.id = fs::path(rel).replace_extension("").generic_string();
            f.category = to_string(rec.category);
            f.clean_wav = wav.generic_string();
            manifest.files.push_back(std::move(f));
        } catch (const Error& e) {
            std::cerr << "prepare: " << csv << ": " << e.what() << '\n';
            ++failures;
        }
    }

    if (!manifest.files.empty())
        manifest.save((fs::path(out_dir) / "manifest.json").string());
    if (failures > 0) {
        std::cerr << "prepare: " << failures << " of " << csvs.size() << " files failed\n";
        return kExitPrepare;
    }
    std::cerr << "prepare: converted " << manifest.files.size() << " files\n";
    return kExitOk;
}

/// Pair every clean WAV with a corrupted copy. Per-file noise seeds are
/// derived from the recipe's base seed and the file id, so the corpus
/// reproduces without storing per-file seeds.
inline int cmd_corrupt(const std::string& manifest_path, const NoiseSpec& spec,
                       const std::string& out_dir) {
    namespace fs = std::filesystem;
    CorpusManifest manifest;
    try {
        manifest = CorpusManifest::load(manifest_path);
    } catch (const Error& e) {
        std::cerr << "corrupt: " << e.what() << '\n';
        return kExitCorrupt;
    }
    if (spec.kind == NoiseKind::file && !spec.file_path) {
        std::cerr << "corrupt: noise kind 'file' requires --noise.path\n";
        return kExitCorrupt;
    }

    CorpusManifest out = manifest;
    out.noise = spec;
    std::size_t failures = 0;
    for (auto& f : out.files) {
        try {
            const Waveform clean = read_wav(f.clean_wav).to_mono();
            const std::uint64_t file_seed = stable_hash(spec.seed, f.id);
            const Waveform noise =
                render_noise(spec, file_seed, clean.size(), clean.sample_rate_hz);
            const Waveform noisy = corrupt(clean, noise, spec.noise_factor);

            const fs::path noisy_path = fs::path(out_dir) / (f.id + ".noisy.wav");
            fs::create_directories(noisy_path.parent_path());
            write_wav_f32(noisy_path.string(), noisy);
            f.noisy_wav = noisy_path.generic_string();
        } catch (const Error& e) {
            std::cerr << "corrupt: " << f.id << ": " << e.what() << '\n';
            ++failures;
        }
    }
    if (failures > 0) {
        std::cerr << "corrupt: " << failures << " of " << out.files.size() << " files failed\n";
        return kExitCorrupt;
    }
    fs::create_directories(out_dir);
    out.save((fs::path(out_dir) / "manifest.json").string());
    std::cerr << "corrupt: wrote " << out.files.size() << " noisy files\n";
    return kExitOk;
}

struct TrainOptions {
    std::string manifest_path;
    std::string out_dir;
    std::uint64_t split_seed = 0;
    TrainConfig train;
    bool full_scale = false;
    bool checkpoint_each_epoch = false;
};

namespace detail {

inline const ManifestFile& manifest_file_by_id(const CorpusManifest& manifest,
                                               const std::string& id) {
    for (const auto& f : manifest.files)
        if (f.id == id) return f;
    throw Error("manifest has no entry for id " + id);
}

template <typename T>
std::vector<WindowPair<T>> load_window_pairs(const CorpusManifest& manifest,
                                             const std::vector<std::string>& ids,
                                             std::size_t window_len) {
    std::vector<WindowPair<T>> pairs;
    for (const auto& id : ids) {
        const ManifestFile& f = manifest_file_by_id(manifest, id);
        if (f.noisy_wav.empty()) throw Error("manifest entry " + id + " has no noisy file");
        const NormalizedWaveform clean = minmax_normalize(read_wav(f.clean_wav).to_mono());
        const NormalizedWaveform noisy = minmax_normalize(read_wav(f.noisy_wav).to_mono());
        if (clean.size() != noisy.size())
            throw LengthMismatch("clean/noisy length mismatch for " + id);
        if (clean.size() < window_len) {
            std::cerr << "train: skipping " << id << " (shorter than one window)\n";
            continue;
        }
        std::vector<T> clean_t(clean.samples.begin(), clean.samples.end());
        std::vector<T> noisy_t(noisy.samples.begin(), noisy.samples.end());
        auto in_windows = make_windows(noisy_t, window_len);
        auto tgt_windows = make_windows(clean_t, window_len);
        for (std::size_t w = 0; w < in_windows.size(); ++w)
            pairs.push_back({std::move(in_windows[w]), std::move(tgt_windows[w])});
    }
    return pairs;
}

}  // namespace detail

inline int cmd_train(const TrainOptions& opt) {
    namespace fs = std::filesystem;
    if (opt.train.epochs < 1 || opt.train.batch_size < 1) {
        std::cerr << "train: epochs and batch size must be >= 1\n";
        return kExitUsage;
    }
    try {
        const CorpusManifest manifest = CorpusManifest::load(opt.manifest_path);
        std::vector<std::string> ids;
        for (const auto& f : manifest.files) ids.push_back(f.id);
        std::sort(ids.begin(), ids.end());
        if (ids.empty()) {
            std::cerr << "train: manifest lists no files\n";
            return kExitEmptySplit;
        }

        const DatasetSplit split = split_dataset(ids, opt.split_seed);
        if (split.train.empty()) {
            std::cerr << "train: empty training split (corpus of " << ids.size() << ")\n";
            return kExitEmptySplit;
        }

        const auto train_pairs =
            detail::load_window_pairs<double>(manifest, split.train, opt.train.window_len);
        const auto val_pairs =
            detail::load_window_pairs<double>(manifest, split.val, opt.train.window_len);
        if (train_pairs.empty()) {
            std::cerr << "train: no usable training windows\n";
            return kExitEmptySplit;
        }

        const Architecture arch =
            opt.full_scale ? Architecture::full_scale() : Architecture::desk_scale();
        auto model = init_model<double>(opt.train.seed, arch);

        fs::create_directories(opt.out_dir);
        const std::string prefix = (fs::path(opt.out_dir) / "model").string();

        std::function<void(const StepInfo<double>&, const Autoencoder<double>&)> on_step;
        if (opt.checkpoint_each_epoch) {
            const std::size_t batches_per_epoch =
                (train_pairs.size() + opt.train.batch_size - 1) / opt.train.batch_size;
            on_step = [&, batches_per_epoch](const StepInfo<double>& info,
                                             const Autoencoder<double>& m) {
                if (info.batch + 1 == batches_per_epoch)
                    save_checkpoint(m, prefix + "_epoch" + std::to_string(info.epoch));
            };
        }
        const LossCurve curve = fit(model, train_pairs, val_pairs, opt.train, on_step);

        save_checkpoint(model, prefix);
        curve.write_csv((fs::path(opt.out_dir) / "loss_curve.csv").string());
        curve.write_json((fs::path(opt.out_dir) / "loss_curve.json").string());
        std::ofstream splits((fs::path(opt.out_dir) / "split.json").string(), std::ios::trunc);
        splits << split.to_json().dump(2) << '\n';
        if (!splits) throw IoFailure("train: cannot write split.json");

        std::cerr << "train: " << train_pairs.size() << " windows, " << curve.records.size()
                  << " epochs, final train loss " << curve.records.back().train_loss << '\n';
        return kExitOk;
    } catch (const NonFiniteLoss& e) {
        std::cerr << "train: " << e.what() << '\n';
        return kExitNonFiniteLoss;
    } catch (const EmptyTrainSet& e) {
        std::cerr << "train: " << e.what() << '\n';
        return kExitEmptySplit;
    } catch (const Error& e) {
        std::cerr << "train: " << e.what() << '\n';
        return kExitUsage;
    }
}

inline int cmd_denoise(const std::string& model_prefix, const std::string& in_wav,
                       const std::string& out_wav, std::size_t window_len,
                       const std::optional<std::string>& bundle_dir,
                       const std::optional<std::string>& clean_wav) {
    Autoencoder<double> model;
    try {
        model = load_checkpoint<double>(model_prefix);
    } catch (const Error& e) {
        std::cerr << "denoise: " << e.what() << '\n';
        return kExitCheckpoint;
    }
    try {
        const Waveform input = read_wav(in_wav).to_mono();
        const NormalizedWaveform input_norm = minmax_normalize(input);
        const std::vector<double> output = denoise_signal(model, input_norm.samples, window_len);

        NormalizedWaveform out_norm;
        out_norm.samples = output;
        out_norm.sample_rate_hz = input.sample_rate_hz;
        out_norm.norm = input_norm.norm;  // the input's own scale
        const Waveform denoised = denormalize(out_norm);
        write_wav_f32(out_wav, denoised);

        if (bundle_dir) {
            // Without a clean reference the input fills the clean slot.
            const Waveform clean =
                clean_wav ? read_wav(*clean_wav).to_mono() : input;
            emit_comparison_bundle(clean, input, denoised, *bundle_dir);
        }
    } catch (const Error& e) {
        std::cerr << "denoise: " << e.what() << '\n';
        return kExitDenoiseIo;
    }
    return kExitOk;
}

inline int cmd_evaluate(const std::string& model_prefix, const std::string& manifest_path,
                        const std::string& split_path, const std::string& report_dir,
                        std::size_t window_len) {
    namespace fs = std::filesystem;
    Autoencoder<double> model;
    try {
        model = load_checkpoint<double>(model_prefix);
    } catch (const Error& e) {
        std::cerr << "evaluate: " << e.what() << '\n';
        return kExitCheckpoint;
    }
    try {
        const CorpusManifest manifest = CorpusManifest::load(manifest_path);
        std::ifstream sp(split_path);
        if (!sp) throw IoFailure("evaluate: cannot open " + split_path);
        nlohmann::json sj;
        sp >> sj;
        const DatasetSplit split = DatasetSplit::from_json(sj);
        if (split.test.empty()) {
            std::cerr << "evaluate: empty test split\n";
            return kExitEmptyTestSplit;
        }

        std::vector<EvalItem> items;
        std::string category = "mixed";
        bool first = true;
        for (const auto& id : split.test) {
            const ManifestFile& f = detail::manifest_file_by_id(manifest, id);
            if (f.noisy_wav.empty()) throw Error("manifest entry " + id + " has no noisy file");
            EvalItem item;
            item.id = id;
            item.clean = read_wav(f.clean_wav).to_mono();
            item.noisy = read_wav(f.noisy_wav).to_mono();
            items.push_back(std::move(item));
            if (first) {
                category = f.category;
                first = false;
            } else if (category != f.category) {
                category = "mixed";
            }
        }

        const std::string noise_kind =
            manifest.noise ? to_string(manifest.noise->kind) : "unknown";
        const EvalReport report =
            evaluate_testset(model, items, category, noise_kind, window_len);

        fs::create_directories(report_dir);
        emit_report(report, (fs::path(report_dir) / "report").string());

        std::cout << report.category << ' ' << report.noise_kind << ' ' << report.entries.size()
                  << ' ' << report.summary.min << ' ' << report.summary.max << ' '
                  << report.summary.mean << ' ' << report.summary.median << '\n';
        return kExitOk;
    } catch (const EmptyTestSet& e) {
        std::cerr << "evaluate: " << e.what() << '\n';
        return kExitEmptyTestSplit;
    } catch (const Error& e) {
        std::cerr << "evaluate: " << e.what() << '\n';
        return kExitDenoiseIo;
    }
}

struct SynthOptions {
    std::string out_dir;
    std::size_t count = 48;
    double duration_s = 0.16384;  // 8192 samples at 50 kHz
    std::uint32_t sample_rate_hz = 50000;
    double fmin_hz = 40.0;
    double fmax_hz = 70.0;
    std::size_t num_harmonics = 4;
    double harmonic_decay = 0.6;
    std::uint64_t seed = 0;
    std::string category = "normal";
    std::size_t mic_column = kDefaultMicrophoneColumn;
};

/// Generate a desk-scale CSV corpus shaped like the real dataset tree:
/// one 8-column CSV per sound with the signal in the microphone column.
inline int cmd_synth(const SynthOptions& opt) {
    namespace fs = std::filesystem;
    if (opt.count == 0 || opt.fmin_hz > opt.fmax_hz || opt.mic_column >= kMafauldaChannels) {
        std::cerr << "synth: invalid options\n";
        return kExitUsage;
    }
    try {
        const fs::path dir = fs::path(opt.out_dir) / opt.category;
        fs::create_directories(dir);
        CounterRng rng(opt.seed);
        for (std::size_t i = 0; i < opt.count; ++i) {
            SyntheticMotorConfig cfg;
            cfg.rotation_hz = opt.fmin_hz + rng.next_uniform() * (opt.fmax_hz - opt.fmin_hz);
            cfg.num_harmonics = opt.num_harmonics;
            cfg.harmonic_decay = opt.harmonic_decay;
            cfg.duration_s = opt.duration_s;
            cfg.sample_rate_hz = opt.sample_rate_hz;
            cfg.seed = stable_hash(opt.seed, "sound." + std::to_string(i));
            const Waveform sound = synth_motor_sound(cfg);

            const fs::path csv = dir / (std::to_string(i) + ".csv");
            std::ofstream out(csv, std::ios::trunc);
            if (!out) throw IoFailure("synth: cannot write " + csv.string());
            out.precision(9);
            for (double s : sound.samples) {
                for (std::size_t col = 0; col < kMafauldaChannels; ++col) {
                    if (col) out << ',';
                    out << (col == opt.mic_column ? s : 0.0);
                }
                out << '\n';
            }
        }
        std::cerr << "synth: wrote " << opt.count << " sounds under " << opt.out_dir << '\n';
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "synth: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace denoise
