// Command-line front end for the motor-sound denoising pipeline:
// fetch -> prepare -> corrupt -> train -> denoise/evaluate, plus synth for
// generating desk-scale fixture corpora.
//
// A JSON config (--config) supplies defaults; every config field can be
// overridden by a flag of the same dotted name (e.g. --train.seed).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "denoise/commands.hpp"

namespace {

using nlohmann::json;

json load_config(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            std::ifstream in(argv[i + 1]);
            if (!in) {
                std::cerr << "cannot open config " << argv[i + 1] << '\n';
                std::exit(denoise::kExitUsage);
            }
            try {
                json j;
                in >> j;
                return j;
            } catch (const json::exception& e) {
                std::cerr << "bad config JSON: " << e.what() << '\n';
                std::exit(denoise::kExitUsage);
            }
        }
    }
    return json::object();
}

template <typename T>
void config_default(const json& cfg, const std::string& dotted, T& var) {
    const json* node = &cfg;
    std::size_t pos = 0;
    while (true) {
        const std::size_t dot = dotted.find('.', pos);
        const std::string key = dotted.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (!node->contains(key)) return;
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    try {
        var = node->get<T>();
    } catch (const json::exception&) {
        std::cerr << "config field " << dotted << " has the wrong type\n";
        std::exit(denoise::kExitUsage);
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace denoise;
    const json cfg = load_config(argc, argv);

    CLI::App app{"Induction-motor sound denoising toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config supplying flag defaults");
    bool verbose = false;
    app.add_flag("--verbose", verbose, "Chattier diagnostics on stderr");
    std::uint64_t global_seed = 0;
    auto* global_seed_opt =
        app.add_option("--seed", global_seed, "Master seed for any seed not set explicitly");

    // fetch
    auto* fetch = app.add_subcommand("fetch", "Download and extract a dataset archive");
    std::string fetch_url, fetch_dest;
    std::string fetch_checksum;
    fetch->add_option("url", fetch_url, "Archive URL")->required();
    fetch->add_option("dest", fetch_dest, "Destination directory")->required();
    fetch->add_option("--checksum", fetch_checksum, "Expected SHA-256 of the archive");

    // prepare
    auto* prepare = app.add_subcommand("prepare", "Convert a CSV tree into WAV + manifest");
    std::string dataset_dir, prepare_out;
    std::size_t mic_column = kDefaultMicrophoneColumn;
    config_default(cfg, "dataset_dir", dataset_dir);
    config_default(cfg, "mic_column", mic_column);
    prepare->add_option("--dataset_dir", dataset_dir, "Root of the CSV tree")
        ->required(dataset_dir.empty());
    prepare->add_option("--out_dir", prepare_out, "Output WAV tree")->required();
    prepare->add_option("--mic_column", mic_column, "Microphone column index (default 7)");

    // corrupt
    auto* corrupt_cmd = app.add_subcommand("corrupt", "Add noise to every clean WAV");
    std::string corrupt_manifest, corrupt_out;
    std::string noise_kind = "gaussian";
    double noise_factor = 0.1;
    std::uint64_t noise_seed = 0;
    std::string noise_path;
    config_default(cfg, "noise.kind", noise_kind);
    config_default(cfg, "noise.factor", noise_factor);
    config_default(cfg, "noise.seed", noise_seed);
    config_default(cfg, "noise.path", noise_path);
    corrupt_cmd->add_option("--manifest", corrupt_manifest, "Manifest from prepare")->required();
    corrupt_cmd->add_option("--out_dir", corrupt_out, "Output directory")->required();
    corrupt_cmd->add_option("--noise.kind", noise_kind, "gaussian | blue | file");
    corrupt_cmd->add_option("--noise.factor", noise_factor, "Noise factor (default 0.1)");
    auto* noise_seed_opt = corrupt_cmd->add_option("--noise.seed", noise_seed, "Base noise seed");
    corrupt_cmd->add_option("--noise.path", noise_path, "Noise WAV (kind = file)");

    // train
    auto* train = app.add_subcommand("train", "Train the denoising autoencoder");
    TrainOptions topt;
    config_default(cfg, "split_seed", topt.split_seed);
    config_default(cfg, "train.batch_size", topt.train.batch_size);
    config_default(cfg, "train.epochs", topt.train.epochs);
    config_default(cfg, "train.seed", topt.train.seed);
    config_default(cfg, "train.window_len", topt.train.window_len);
    config_default(cfg, "train.shuffle_each_epoch", topt.train.shuffle_each_epoch);
    train->add_option("--manifest", topt.manifest_path, "Manifest from corrupt")->required();
    train->add_option("--out_dir", topt.out_dir, "Checkpoint/curve/split output dir")->required();
    auto* split_seed_opt = train->add_option("--split_seed", topt.split_seed, "Split seed");
    train->add_option("--train.batch_size", topt.train.batch_size, "Batch size (default 8)");
    train->add_option("--train.epochs", topt.train.epochs, "Epochs (default 10)");
    auto* train_seed_opt = train->add_option("--train.seed", topt.train.seed, "Training seed");
    train->add_option("--train.window_len", topt.train.window_len,
                      "Training window length (default 16384)");
    train->add_option("--train.shuffle_each_epoch", topt.train.shuffle_each_epoch,
                      "Reshuffle every epoch (default true)");
    train->add_flag("--train.checkpoint_each_epoch", topt.checkpoint_each_epoch,
                    "Also write model_epochN checkpoints");
    train->add_flag("--full-scale", topt.full_scale,
                    "Use the 128/32/16/8 architecture instead of the desk-scale default");

    // denoise
    auto* denoise_cmd = app.add_subcommand("denoise", "Denoise one WAV with a checkpoint");
    std::string model_path, in_wav, out_wav;
    std::size_t infer_window = 16384;
    std::string bundle_dir, clean_wav;
    config_default(cfg, "model_path", model_path);
    config_default(cfg, "train.window_len", infer_window);
    denoise_cmd->add_option("--model_path", model_path, "Checkpoint prefix")
        ->required(model_path.empty());
    denoise_cmd->add_option("--in", in_wav, "Input WAV")->required();
    denoise_cmd->add_option("--out", out_wav, "Output WAV")->required();
    denoise_cmd->add_option("--window_len", infer_window, "Inference window length");
    denoise_cmd->add_option("--bundle", bundle_dir,
                            "Also write the clean/noisy/denoised comparison bundle here");
    denoise_cmd->add_option("--clean", clean_wav, "Clean reference WAV for the bundle");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Per-sound MSE report over the test split");
    std::string eval_model, eval_manifest, eval_split, report_dir;
    std::size_t eval_window = 16384;
    config_default(cfg, "model_path", eval_model);
    config_default(cfg, "report_dir", report_dir);
    config_default(cfg, "train.window_len", eval_window);
    evaluate->add_option("--model_path", eval_model, "Checkpoint prefix")
        ->required(eval_model.empty());
    evaluate->add_option("--manifest", eval_manifest, "Manifest from corrupt")->required();
    evaluate->add_option("--split", eval_split, "Split manifest from train")->required();
    evaluate->add_option("--report_dir", report_dir, "Report output dir")
        ->required(report_dir.empty());
    evaluate->add_option("--window_len", eval_window, "Inference window length");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic desk-scale CSV corpus");
    SynthOptions sopt;
    config_default(cfg, "category", sopt.category);
    config_default(cfg, "mic_column", sopt.mic_column);
    synth->add_option("--out_dir", sopt.out_dir, "Corpus root")->required();
    synth->add_option("--count", sopt.count, "Number of sounds (default 48)");
    synth->add_option("--duration", sopt.duration_s, "Seconds per sound");
    synth->add_option("--rate", sopt.sample_rate_hz, "Sample rate (default 50000)");
    synth->add_option("--fmin", sopt.fmin_hz, "Lowest fundamental (default 40)");
    synth->add_option("--fmax", sopt.fmax_hz, "Highest fundamental (default 70)");
    synth->add_option("--harmonics", sopt.num_harmonics, "Harmonics per sound");
    synth->add_option("--decay", sopt.harmonic_decay, "Harmonic amplitude decay");
    auto* synth_seed_opt = synth->add_option("--synth_seed", sopt.seed, "Corpus seed");
    synth->add_option("--category", sopt.category, "Category directory name");
    synth->add_option("--mic_column", sopt.mic_column, "Column carrying the signal");

    CLI11_PARSE(app, argc, argv);

    // The master --seed fills any seed the user left untouched.
    if (global_seed_opt->count() > 0) {
        if (noise_seed_opt->count() == 0) noise_seed = global_seed;
        if (split_seed_opt->count() == 0) topt.split_seed = global_seed;
        if (train_seed_opt->count() == 0) topt.train.seed = global_seed;
        if (synth_seed_opt->count() == 0) sopt.seed = global_seed;
    }

    if (verbose) {
        std::cerr << "command: " << app.get_subcommands().front()->get_name();
        if (!config_path.empty()) std::cerr << " (config " << config_path << ")";
        std::cerr << "\nseeds: noise=" << noise_seed << " split=" << topt.split_seed
                  << " train=" << topt.train.seed << " synth=" << sopt.seed << '\n';
    }

    if (fetch->parsed()) {
        return cmd_fetch(fetch_url, fetch_dest,
                         fetch_checksum.empty() ? std::nullopt
                                                : std::optional<std::string>(fetch_checksum));
    }
    if (prepare->parsed()) return cmd_prepare(dataset_dir, prepare_out, mic_column);
    if (corrupt_cmd->parsed()) {
        NoiseSpec spec;
        try {
            spec.kind = noise_kind_from_string(noise_kind);
        } catch (const Error& e) {
            std::cerr << e.what() << '\n';
            return kExitUsage;
        }
        spec.noise_factor = noise_factor;
        spec.seed = noise_seed;
        if (!noise_path.empty()) spec.file_path = noise_path;
        return cmd_corrupt(corrupt_manifest, spec, corrupt_out);
    }
    if (train->parsed()) return cmd_train(topt);
    if (denoise_cmd->parsed()) {
        return cmd_denoise(model_path, in_wav, out_wav, infer_window,
                           bundle_dir.empty() ? std::nullopt
                                              : std::optional<std::string>(bundle_dir),
                           clean_wav.empty() ? std::nullopt
                                             : std::optional<std::string>(clean_wav));
    }
    if (evaluate->parsed())
        return cmd_evaluate(eval_model, eval_manifest, eval_split, report_dir, eval_window);
    if (synth->parsed()) return cmd_synth(sopt);
    return kExitUsage;
}
