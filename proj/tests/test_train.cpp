#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "denoise/noise.hpp"
#include "denoise/train.hpp"
#include "denoise/waveform.hpp"

using namespace denoise;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Noisy/clean window pairs from sine "motor tones" plus scaled Gaussian
// noise, both sides normalized independently as the pipeline does.
std::vector<WindowPair<double>> sine_pairs(std::size_t count, std::size_t window_len,
                                           std::uint64_t seed) {
    std::vector<WindowPair<double>> pairs;
    CounterRng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const double freq = 40.0 + rng.next_uniform() * 30.0;
        const double phase = rng.next_uniform() * 2.0 * kPi;
        Waveform clean;
        clean.sample_rate_hz = 50000;
        clean.samples.resize(window_len * 2);
        for (std::size_t t = 0; t < clean.samples.size(); ++t)
            clean.samples[t] = std::sin(2.0 * kPi * freq * t / 50000.0 + phase);

        const Waveform noise = gaussian_noise(clean.size(), seed * 1000 + i);
        const Waveform noisy = corrupt(clean, noise, 0.1);

        const auto clean_norm = minmax_normalize(clean);
        const auto noisy_norm = minmax_normalize(noisy);
        const auto in_windows = make_windows(noisy_norm.samples, window_len);
        const auto tgt_windows = make_windows(clean_norm.samples, window_len);
        for (std::size_t w = 0; w < in_windows.size(); ++w)
            pairs.push_back({in_windows[w], tgt_windows[w]});
    }
    return pairs;
}

}  // namespace

TEST_CASE("training lowers the loss on a synthetic fixture") {
    const std::size_t window = 1024;
    auto pairs = sine_pairs(16, window, 2024);
    REQUIRE(pairs.size() == 32);
    std::vector<WindowPair<double>> val(pairs.begin(), pairs.begin() + 4);

    auto model = init_model<double>(1, Architecture{{4, 2}, {2, 4}, 3, 2});
    TrainConfig cfg;
    cfg.window_len = window;
    cfg.epochs = 10;
    cfg.seed = 7;
    const LossCurve curve = fit(model, pairs, val, cfg);

    REQUIRE(curve.records.size() == 10);
    REQUIRE(curve.records.back().train_loss < curve.records.front().train_loss);
    for (const auto& r : curve.records) {
        REQUIRE(std::isfinite(r.train_loss));
        REQUIRE(std::isfinite(r.val_loss));
        REQUIRE(r.train_loss >= 0.0);
    }

    // Mean of the last two epochs beats the mean of the first two.
    const auto& rs = curve.records;
    const double first2 = (rs[0].train_loss + rs[1].train_loss) / 2.0;
    const double last2 = (rs[rs.size() - 2].train_loss + rs[rs.size() - 1].train_loss) / 2.0;
    REQUIRE(last2 < first2);
}

TEST_CASE("fit is deterministic for a fixed seed") {
    const std::size_t window = 256;
    auto pairs = sine_pairs(8, window, 99);
    std::vector<WindowPair<double>> val(pairs.begin(), pairs.begin() + 2);

    TrainConfig cfg;
    cfg.window_len = window;
    cfg.epochs = 3;
    cfg.seed = 5;

    auto model_a = init_model<double>(2, Architecture{{4, 2}, {2, 4}, 3, 2});
    auto model_b = init_model<double>(2, Architecture{{4, 2}, {2, 4}, 3, 2});
    const LossCurve a = fit(model_a, pairs, val, cfg);
    const LossCurve b = fit(model_b, pairs, val, cfg);

    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        REQUIRE(a.records[i].train_loss == b.records[i].train_loss);
        REQUIRE(a.records[i].val_loss == b.records[i].val_loss);
    }
    REQUIRE(model_a.encoder[0].weights == model_b.encoder[0].weights);
    REQUIRE(model_a.head.weights == model_b.head.weights);
}

TEST_CASE("max-norm invariant holds after every optimizer step") {
    const std::size_t window = 256;
    auto pairs = sine_pairs(6, window, 31);

    auto model = init_model<double>(4, Architecture{{4, 2}, {2, 4}, 3, 2});
    TrainConfig cfg;
    cfg.window_len = window;
    cfg.epochs = 3;
    std::size_t steps_seen = 0;
    fit<double>(model, pairs, {}, cfg,
                [&](const StepInfo<double>&, const Autoencoder<double>& m) {
                    ++steps_seen;
                    REQUIRE(max_unit_norm(m) <= 2.0 + 1e-12);
                });
    REQUIRE(steps_seen > 0);
}

TEST_CASE("partial final minibatch is processed, not dropped") {
    const std::size_t window = 64;
    auto all = sine_pairs(5, window, 55);
    std::vector<WindowPair<double>> pairs(all.begin(), all.begin() + 9);

    auto model = init_model<double>(4, Architecture{{2}, {2}, 3, 2});
    TrainConfig cfg;
    cfg.window_len = window;
    cfg.epochs = 1;
    cfg.batch_size = 8;
    std::size_t batches = 0;
    fit<double>(model, pairs, {}, cfg,
                [&](const StepInfo<double>&, const Autoencoder<double>&) { ++batches; });
    REQUIRE(batches == 2);  // 8 + 1
}

TEST_CASE("fit validates its inputs") {
    auto model = init_model<double>(4, Architecture::desk_scale());
    TrainConfig cfg;
    cfg.window_len = 64;
    REQUIRE_THROWS_AS(fit<double>(model, {}, {}, cfg), EmptyTrainSet);

    auto pairs = sine_pairs(2, 64, 3);
    cfg.epochs = 0;
    REQUIRE_THROWS_AS(fit<double>(model, pairs, {}, cfg), ShapeMismatch);
    cfg.epochs = 1;
    cfg.window_len = 63;  // not a multiple of 16
    REQUIRE_THROWS_AS(fit<double>(model, pairs, {}, cfg), LengthNotDivisible);
}

TEST_CASE("non-finite loss aborts with context") {
    auto pairs = sine_pairs(4, 64, 77);
    auto model = init_model<double>(4, Architecture{{2}, {2}, 3, 2});
    // Poison the sigmoid head; a NaN behind a relu would be silenced to 0.
    for (auto& w : model.head.weights) w = std::numeric_limits<double>::quiet_NaN();
    TrainConfig cfg;
    cfg.window_len = 64;
    REQUIRE_THROWS_AS(fit<double>(model, pairs, {}, cfg), NonFiniteLoss);
    try {
        fit<double>(model, pairs, {}, cfg);
    } catch (const NonFiniteLoss& e) {
        REQUIRE(std::string(e.what()).find("epoch") != std::string::npos);
        REQUIRE(std::string(e.what()).find("batch") != std::string::npos);
    }
}

TEST_CASE("loss curve export") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "denoise_curve_test";
    fs::create_directories(dir);

    LossCurve curve;
    curve.records = {{1, 0.7, 0.71}, {2, 0.65, 0.66}};
    curve.write_csv((dir / "curve.csv").string());
    curve.write_json((dir / "curve.json").string());

    std::ifstream csv(dir / "curve.csv");
    std::string line;
    std::getline(csv, line);
    REQUIRE(line == "epoch,train_loss,val_loss");
    std::size_t rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    REQUIRE(rows == 2);

    nlohmann::json j;
    std::ifstream(dir / "curve.json") >> j;
    REQUIRE(j.size() == 2);
    REQUIRE(j[0]["epoch"] == 1);
    REQUIRE(j[1]["train_loss"] == 0.65);
}

TEST_CASE("windowing drops the trailing partial window") {
    std::vector<double> samples(130, 0.5);
    const auto windows = make_windows(samples, 64);
    REQUIRE(windows.size() == 2);
    REQUIRE(windows[0].size() == 64);
    const auto none = make_windows(std::vector<double>(63, 0.1), 64);
    REQUIRE(none.empty());
}
