#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "denoise/manifest.hpp"
#include "denoise/wav_io.hpp"

using namespace denoise;
namespace fs = std::filesystem;

namespace {

std::string tool_path() {
    const char* bin = std::getenv("DENOISER_BIN");
    return bin ? bin : "";
}

fs::path work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "denoise_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run(const std::string& args) {
    static int counter = 0;
    const fs::path out = work_dir() / ("stdout_" + std::to_string(counter) + ".txt");
    const fs::path err = work_dir() / ("stderr_" + std::to_string(counter) + ".txt");
    ++counter;

    const std::string cmd =
        tool_path() + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());

    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream of(out), ef(err);
    result.out.assign((std::istreambuf_iterator<char>(of)), std::istreambuf_iterator<char>());
    result.err.assign((std::istreambuf_iterator<char>(ef)), std::istreambuf_iterator<char>());
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// The pipeline directories built once and reused across cases.
const fs::path kCorpus = work_dir() / "corpus";
const fs::path kPrepared = work_dir() / "prepared";
const fs::path kCorrupted = work_dir() / "corrupted";
const fs::path kRun = work_dir() / "run";

// Build the synth/prepare/corrupt/train chain when a case runs without the
// end-to-end case having gone first.
void ensure_pipeline() {
    if (fs::exists(kRun / "model.json")) return;
    run("synth --out_dir " + kCorpus.string() + " --count 12 --duration 0.04096 --synth_seed 5");
    run("prepare --dataset_dir " + kCorpus.string() + " --out_dir " + kPrepared.string());
    run("corrupt --manifest " + (kPrepared / "manifest.json").string() + " --out_dir " +
        kCorrupted.string() + " --noise.kind gaussian --noise.factor 0.1 --noise.seed 9");
    run("train --manifest " + (kCorrupted / "manifest.json").string() +
        " --split_seed 3 --train.seed 4 --train.epochs 2 --train.window_len 256 --out_dir " +
        kRun.string());
}

}  // namespace

TEST_CASE("cli pipeline end to end") {
    if (tool_path().empty()) SKIP("DENOISER_BIN not set");

    // --- synth ---------------------------------------------------------
    // 12 sounds of 2048 samples; split -> test 4 / val 2 / train 6.
    REQUIRE(run("synth --out_dir " + kCorpus.string() +
                " --count 12 --duration 0.04096 --synth_seed 5")
                .exit_code == 0);
    REQUIRE(fs::exists(kCorpus / "normal" / "0.csv"));
    REQUIRE(fs::exists(kCorpus / "normal" / "11.csv"));

    // --- prepare -------------------------------------------------------
    REQUIRE(run("prepare --dataset_dir " + kCorpus.string() + " --out_dir " +
                kPrepared.string())
                .exit_code == 0);
    REQUIRE(fs::exists(kPrepared / "manifest.json"));
    const CorpusManifest prepared = CorpusManifest::load((kPrepared / "manifest.json").string());
    REQUIRE(prepared.files.size() == 12);
    REQUIRE(prepared.files[0].category == "normal");
    REQUIRE(fs::exists(kPrepared / "normal" / "0.wav"));

    // --- corrupt -------------------------------------------------------
    REQUIRE(run("corrupt --manifest " + (kPrepared / "manifest.json").string() + " --out_dir " +
                kCorrupted.string() + " --noise.kind gaussian --noise.factor 0.1 --noise.seed 9")
                .exit_code == 0);
    const CorpusManifest corrupted =
        CorpusManifest::load((kCorrupted / "manifest.json").string());
    REQUIRE(corrupted.noise.has_value());
    REQUIRE(corrupted.noise->noise_factor == 0.1);
    for (const auto& f : corrupted.files) REQUIRE(fs::exists(f.noisy_wav));

    // corrupt is idempotent: a rerun produces byte-identical noisy files
    const fs::path corrupted_again = work_dir() / "corrupted_again";
    REQUIRE(run("corrupt --manifest " + (kPrepared / "manifest.json").string() + " --out_dir " +
                corrupted_again.string() +
                " --noise.kind gaussian --noise.factor 0.1 --noise.seed 9")
                .exit_code == 0);
    REQUIRE(slurp(corrupted.files[0].noisy_wav) ==
            slurp(corrupted_again / "normal" / "0.noisy.wav"));

    // --- train ---------------------------------------------------------
    const std::string train_args = "train --manifest " +
                                   (kCorrupted / "manifest.json").string() +
                                   " --split_seed 3 --train.seed 4 --train.epochs 2"
                                   " --train.window_len 256";
    REQUIRE(run(train_args + " --out_dir " + kRun.string()).exit_code == 0);
    REQUIRE(fs::exists(kRun / "model.json"));
    REQUIRE(fs::exists(kRun / "model.bin"));
    REQUIRE(fs::exists(kRun / "loss_curve.csv"));
    REQUIRE(fs::exists(kRun / "loss_curve.json"));
    REQUIRE(fs::exists(kRun / "split.json"));

    // Identical rerun reproduces the outputs byte for byte.
    const fs::path rerun = work_dir() / "run_again";
    REQUIRE(run(train_args + " --out_dir " + rerun.string()).exit_code == 0);
    REQUIRE(slurp(kRun / "loss_curve.csv") == slurp(rerun / "loss_curve.csv"));
    REQUIRE(slurp(kRun / "model.bin") == slurp(rerun / "model.bin"));
    REQUIRE(slurp(kRun / "model.json") == slurp(rerun / "model.json"));

    // --- denoise -------------------------------------------------------
    const std::string noisy0 = corrupted.files[0].noisy_wav;
    const fs::path denoised_wav = work_dir() / "denoised.wav";
    REQUIRE(run("denoise --model_path " + (kRun / "model").string() + " --in " + noisy0 +
                " --out " + denoised_wav.string() + " --window_len 256")
                .exit_code == 0);
    const WavData in_wav = read_wav(noisy0);
    const WavData out_wav = read_wav(denoised_wav.string());
    REQUIRE(out_wav.frames() == in_wav.frames());
    REQUIRE(out_wav.sample_rate_hz == in_wav.sample_rate_hz);

    // Bundle: nine files.
    const fs::path bundle = work_dir() / "bundle";
    REQUIRE(run("denoise --model_path " + (kRun / "model").string() + " --in " + noisy0 +
                " --out " + denoised_wav.string() + " --window_len 256 --clean " +
                corrupted.files[0].clean_wav + " --bundle " + bundle.string())
                .exit_code == 0);
    std::size_t bundle_files = 0;
    for (const auto& entry : fs::directory_iterator(bundle))
        if (entry.is_regular_file()) ++bundle_files;
    REQUIRE(bundle_files == 9);

    // --- evaluate ------------------------------------------------------
    const fs::path reports = work_dir() / "reports";
    const RunResult eval = run("evaluate --model_path " + (kRun / "model").string() +
                               " --manifest " + (kCorrupted / "manifest.json").string() +
                               " --split " + (kRun / "split.json").string() + " --report_dir " +
                               reports.string() + " --window_len 256");
    REQUIRE(eval.exit_code == 0);
    REQUIRE(fs::exists(reports / "report.json"));
    REQUIRE(fs::exists(reports / "report.csv"));

    // stdout: `category noise_kind n min max mean median`
    std::istringstream summary(eval.out);
    std::string category, noise_kind;
    std::size_t n = 0;
    double mn = 0, mx = 0, mean = 0, median = 0;
    summary >> category >> noise_kind >> n >> mn >> mx >> mean >> median;
    REQUIRE(category == "normal");
    REQUIRE(noise_kind == "gaussian");
    REQUIRE(n == 4);
    REQUIRE(mn <= mx);

    nlohmann::json report;
    std::ifstream(reports / "report.json") >> report;
    REQUIRE(report["entries"].size() == 4);

    const RunResult eval_again =
        run("evaluate --model_path " + (kRun / "model").string() + " --manifest " +
            (kCorrupted / "manifest.json").string() + " --split " +
            (kRun / "split.json").string() + " --report_dir " + (work_dir() / "reports2").string() +
            " --window_len 256");
    REQUIRE(eval_again.exit_code == 0);
    REQUIRE(slurp(reports / "report.json") == slurp(work_dir() / "reports2" / "report.json"));
}

TEST_CASE("cli error paths use their documented exit codes") {
    if (tool_path().empty()) SKIP("DENOISER_BIN not set");
    ensure_pipeline();

    SECTION("prepare: malformed csv fails with 20 and names the file") {
        const fs::path bad = work_dir() / "bad_corpus";
        fs::create_directories(bad / "normal");
        std::ofstream(bad / "normal" / "broken.csv") << "1,2,three,4,5,6,7,8\n";
        const RunResult r =
            run("prepare --dataset_dir " + bad.string() + " --out_dir " +
                (work_dir() / "bad_prepared").string());
        REQUIRE(r.exit_code == 20);
        REQUIRE(r.err.find("broken.csv") != std::string::npos);
    }
    SECTION("prepare: empty directory fails with 20") {
        const fs::path empty = work_dir() / "empty_corpus";
        fs::create_directories(empty);
        const RunResult r = run("prepare --dataset_dir " + empty.string() + " --out_dir " +
                                (work_dir() / "empty_prepared").string());
        REQUIRE(r.exit_code == 20);
        REQUIRE(r.err.find("no input files") != std::string::npos);
    }
    SECTION("corrupt: file noise without a path fails with 21") {
        const RunResult r = run("corrupt --manifest " + (kPrepared / "manifest.json").string() +
                                " --out_dir " + (work_dir() / "cx").string() +
                                " --noise.kind file");
        REQUIRE(r.exit_code == 21);
    }
    SECTION("train: zero epochs is a usage error") {
        const RunResult r = run("train --manifest " + (kCorrupted / "manifest.json").string() +
                                " --out_dir " + (work_dir() / "tx").string() +
                                " --train.epochs 0");
        REQUIRE(r.exit_code == 2);
    }
    SECTION("denoise: missing checkpoint fails with 40") {
        const RunResult r = run("denoise --model_path /nonexistent/model --in " +
                                (work_dir() / "denoised.wav").string() + " --out " +
                                (work_dir() / "x.wav").string());
        REQUIRE(r.exit_code == 40);
    }
    SECTION("evaluate: empty test split fails with 50") {
        nlohmann::json split{{"seed", 0},
                             {"train", nlohmann::json::array({"normal/0"})},
                             {"val", nlohmann::json::array()},
                             {"test", nlohmann::json::array()}};
        const fs::path split_path = work_dir() / "empty_split.json";
        std::ofstream(split_path) << split.dump();
        const RunResult r = run("evaluate --model_path " + (kRun / "model").string() +
                                " --manifest " + (kCorrupted / "manifest.json").string() +
                                " --split " + split_path.string() + " --report_dir " +
                                (work_dir() / "rx").string());
        REQUIRE(r.exit_code == 50);
    }
    SECTION("fetch: mismatch 11, broken archive 12, unreachable host 10") {
        httplib::Server server;
        server.Get("/a.zip", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("PK\x05\x06 not really", "application/zip");
        });
        const int port = server.bind_to_any_port("127.0.0.1");
        std::thread server_thread([&] { server.listen_after_bind(); });
        server.wait_until_ready();

        const RunResult bad_sum =
            run("fetch http://127.0.0.1:" + std::to_string(port) + "/a.zip " +
                (work_dir() / "fx").string() + " --checksum " + std::string(64, '0'));
        REQUIRE(bad_sum.exit_code == 11);

        const RunResult bad_zip = run("fetch http://127.0.0.1:" + std::to_string(port) +
                                      "/a.zip " + (work_dir() / "fz").string());
        REQUIRE(bad_zip.exit_code == 12);

        server.stop();
        server_thread.join();

        const RunResult unreachable = run("fetch http://127.0.0.1:1/a.zip " +
                                          (work_dir() / "fy").string());
        REQUIRE(unreachable.exit_code == 10);
    }
    SECTION("train: a manifest with no files is an empty split (31)") {
        nlohmann::json manifest{{"version", 1}, {"files", nlohmann::json::array()}};
        const fs::path path = work_dir() / "empty_manifest.json";
        std::ofstream(path) << manifest.dump();
        const RunResult r = run("train --manifest " + path.string() + " --out_dir " +
                                (work_dir() / "ty").string());
        REQUIRE(r.exit_code == 31);
    }
    SECTION("denoise: unreadable input wav fails with 41") {
        const RunResult r = run("denoise --model_path " + (kRun / "model").string() +
                                " --in /nonexistent/in.wav --out " +
                                (work_dir() / "y.wav").string() + " --window_len 256");
        REQUIRE(r.exit_code == 41);
    }
}

TEST_CASE("corrupt with factor zero reproduces the clean file bitwise") {
    if (tool_path().empty()) SKIP("DENOISER_BIN not set");
    ensure_pipeline();

    const fs::path zero_out = work_dir() / "corrupted_zero";
    REQUIRE(run("corrupt --manifest " + (kPrepared / "manifest.json").string() + " --out_dir " +
                zero_out.string() + " --noise.factor 0 --noise.seed 1")
                .exit_code == 0);
    const CorpusManifest manifest = CorpusManifest::load((zero_out / "manifest.json").string());
    for (const auto& f : manifest.files) {
        const WavData clean = read_wav(f.clean_wav);
        const WavData noisy = read_wav(f.noisy_wav);
        REQUIRE(clean.samples == noisy.samples);
    }
}

TEST_CASE("train --full-scale selects the 128/32/16/8 architecture") {
    if (tool_path().empty()) SKIP("DENOISER_BIN not set");
    ensure_pipeline();

    const fs::path out = work_dir() / "run_full";
    REQUIRE(run("train --manifest " + (kCorrupted / "manifest.json").string() +
                " --split_seed 3 --train.seed 4 --train.epochs 1 --train.window_len 256"
                " --full-scale --out_dir " +
                out.string())
                .exit_code == 0);
    nlohmann::json manifest;
    std::ifstream(out / "model.json") >> manifest;
    REQUIRE(manifest["arch"]["encoder"] == nlohmann::json({128, 32, 16, 8}));
    REQUIRE(manifest["arch"]["decoder"] == nlohmann::json({8, 16, 32, 128}));
}

TEST_CASE("train can checkpoint each epoch") {
    if (tool_path().empty()) SKIP("DENOISER_BIN not set");
    ensure_pipeline();

    const fs::path out = work_dir() / "run_epochs";
    REQUIRE(run("train --manifest " + (kCorrupted / "manifest.json").string() +
                " --split_seed 3 --train.seed 4 --train.epochs 2 --train.window_len 256"
                " --train.checkpoint_each_epoch --out_dir " +
                out.string())
                .exit_code == 0);
    REQUIRE(fs::exists(out / "model_epoch1.json"));
    REQUIRE(fs::exists(out / "model_epoch1.bin"));
    REQUIRE(fs::exists(out / "model_epoch2.bin"));
    REQUIRE(fs::exists(out / "model.json"));
}

TEST_CASE("config file supplies defaults that flags override") {
    if (tool_path().empty()) SKIP("DENOISER_BIN not set");
    ensure_pipeline();

    nlohmann::json cfg{{"noise", {{"kind", "gaussian"}, {"factor", 0.0}, {"seed", 1}}}};
    const fs::path cfg_path = work_dir() / "config.json";
    std::ofstream(cfg_path) << cfg.dump();

    // factor comes from the config (0.0 -> bitwise-equal output)
    const fs::path out_a = work_dir() / "cfg_corrupt_a";
    REQUIRE(run("--config " + cfg_path.string() + " corrupt --manifest " +
                (kPrepared / "manifest.json").string() + " --out_dir " + out_a.string())
                .exit_code == 0);
    const CorpusManifest ma = CorpusManifest::load((out_a / "manifest.json").string());
    REQUIRE(ma.noise->noise_factor == 0.0);

    // an explicit flag wins over the config
    const fs::path out_b = work_dir() / "cfg_corrupt_b";
    REQUIRE(run("--config " + cfg_path.string() + " corrupt --manifest " +
                (kPrepared / "manifest.json").string() + " --out_dir " + out_b.string() +
                " --noise.factor 0.2")
                .exit_code == 0);
    const CorpusManifest mb = CorpusManifest::load((out_b / "manifest.json").string());
    REQUIRE(mb.noise->noise_factor == 0.2);
}
