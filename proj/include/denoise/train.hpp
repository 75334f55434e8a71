#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "denoise/adam.hpp"
#include "denoise/errors.hpp"
#include "denoise/loss.hpp"
#include "denoise/model.hpp"
#include "denoise/rng.hpp"

namespace denoise {

struct TrainConfig {
    std::size_t batch_size = 8;
    std::size_t epochs = 10;
    std::uint64_t seed = 0;
    std::size_t window_len = 16384;
    bool shuffle_each_epoch = true;
    AdamConfig adam;
    double max_norm = 2.0;
};

/// One (noisy input, clean target) training window, both normalized to [0,1].
template <typename T>
struct WindowPair {
    std::vector<T> input;
    std::vector<T> target;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;  // NaN when no validation data was supplied
};

struct LossCurve {
    std::vector<EpochRecord> records;

    void write_csv(const std::string& path) const {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw IoFailure("LossCurve: cannot write " + path);
        out << "epoch,train_loss,val_loss\n";
        out.precision(17);
        for (const auto& r : records)
            out << r.epoch << ',' << r.train_loss << ',' << r.val_loss << '\n';
        if (!out) throw IoFailure("LossCurve: write failed: " + path);
    }

    void write_json(const std::string& path) const {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : records)
            j.push_back({{"epoch", r.epoch},
                         {"train_loss", r.train_loss},
                         {"val_loss", r.val_loss}});
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw IoFailure("LossCurve: cannot write " + path);
        out << j.dump(2) << '\n';
    }
};

/// Cut a normalized signal into consecutive non-overlapping complete
/// windows; a trailing partial window is dropped.
template <typename T>
std::vector<std::vector<T>> make_windows(const std::vector<T>& samples, std::size_t window_len) {
    std::vector<std::vector<T>> windows;
    for (std::size_t start = 0; start + window_len <= samples.size(); start += window_len)
        windows.emplace_back(samples.begin() + start, samples.begin() + start + window_len);
    return windows;
}

/// Step-level hook, called after each optimizer step (and max-norm
/// projection). Used for per-step invariant checks and checkpointing.
template <typename T>
struct StepInfo {
    std::size_t epoch = 0;  // 1-based
    std::size_t batch = 0;  // 0-based within the epoch
    std::uint64_t step = 0; // global optimizer step count
    double batch_loss = 0.0;
};

namespace detail {

template <typename T>
Tensor3<T> gather_batch(const std::vector<WindowPair<T>>& pairs,
                        const std::vector<std::size_t>& order, std::size_t first,
                        std::size_t count, bool target, std::size_t window_len) {
    Tensor3<T> out(count, window_len, 1);
    for (std::size_t b = 0; b < count; ++b) {
        const auto& pair = pairs[order[first + b]];
        const auto& src = target ? pair.target : pair.input;
        std::copy(src.begin(), src.end(), out.data.begin() + b * window_len);
    }
    return out;
}

template <typename T>
double full_pass_loss(const Autoencoder<T>& model, const std::vector<WindowPair<T>>& pairs,
                      std::size_t batch_size, std::size_t window_len) {
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), 0);
    double loss_sum = 0.0;
    std::size_t elements = 0;
    for (std::size_t first = 0; first < pairs.size(); first += batch_size) {
        const std::size_t count = std::min(batch_size, pairs.size() - first);
        const Tensor3<T> input = gather_batch(pairs, order, first, count, false, window_len);
        const Tensor3<T> target = gather_batch(pairs, order, first, count, true, window_len);
        const ForwardCache<T> cache = model_forward(model, input);
        loss_sum += bce_loss(target, cache.output) * static_cast<double>(target.size());
        elements += target.size();
    }
    return loss_sum / static_cast<double>(elements);
}

}  // namespace detail

/// Train the autoencoder in place: per epoch a seeded shuffle, minibatches
/// (final partial batch included), BCE, backward, Adam, then the max-norm
/// projection. Deterministic per seed. Throws NonFiniteLoss with
/// epoch/batch context when the loss diverges.
template <typename T>
LossCurve fit(Autoencoder<T>& model, const std::vector<WindowPair<T>>& train_pairs,
              const std::vector<WindowPair<T>>& val_pairs, const TrainConfig& cfg,
              const std::function<void(const StepInfo<T>&, const Autoencoder<T>&)>& on_step = {}) {
    if (train_pairs.empty()) throw EmptyTrainSet("fit: no training pairs");
    if (cfg.batch_size < 1 || cfg.epochs < 1)
        throw ShapeMismatch("fit: batch_size and epochs must be >= 1");
    const std::size_t multiple = model.arch.length_multiple();
    if (cfg.window_len == 0 || cfg.window_len % multiple != 0)
        throw LengthNotDivisible("fit: window_len must be a positive multiple of " +
                                 std::to_string(multiple));
    for (const auto& p : train_pairs)
        if (p.input.size() != cfg.window_len || p.target.size() != cfg.window_len)
            throw ShapeMismatch("fit: training pair length does not match window_len");
    for (const auto& p : val_pairs)
        if (p.input.size() != cfg.window_len || p.target.size() != cfg.window_len)
            throw ShapeMismatch("fit: validation pair length does not match window_len");

    auto refs = param_refs(model);
    AdamState<T> opt = AdamState<T>::for_params(refs, cfg.adam);

    LossCurve curve;
    std::uint64_t global_step = 0;
    std::vector<std::size_t> order(train_pairs.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.shuffle_each_epoch)
            seeded_shuffle(order, stable_hash(cfg.seed, "epoch." + std::to_string(epoch)));

        double loss_sum = 0.0;
        std::size_t elements = 0;
        std::size_t batch_index = 0;
        for (std::size_t first = 0; first < train_pairs.size();
             first += cfg.batch_size, ++batch_index) {
            const std::size_t count = std::min(cfg.batch_size, train_pairs.size() - first);
            const Tensor3<T> input =
                detail::gather_batch(train_pairs, order, first, count, false, cfg.window_len);
            const Tensor3<T> target =
                detail::gather_batch(train_pairs, order, first, count, true, cfg.window_len);

            const ForwardCache<T> cache = model_forward(model, input);
            const double batch_loss = bce_loss(target, cache.output);
            if (!std::isfinite(batch_loss))
                throw NonFiniteLoss("fit: non-finite loss at epoch " + std::to_string(epoch) +
                                    ", batch " + std::to_string(batch_index));
            const Tensor3<T> grad_out = bce_grad(target, cache.output);
            const ModelGrads<T> grads = model_backward(model, cache, grad_out);
            adam_step(refs, grads, opt);
            apply_max_norm(model, cfg.max_norm);
            ++global_step;

            loss_sum += batch_loss * static_cast<double>(target.size());
            elements += target.size();
            if (on_step) on_step(StepInfo<T>{epoch, batch_index, global_step, batch_loss}, model);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(elements);
        rec.val_loss = val_pairs.empty()
                           ? std::numeric_limits<double>::quiet_NaN()
                           : detail::full_pass_loss(model, val_pairs, cfg.batch_size, cfg.window_len);
        curve.records.push_back(rec);
    }
    return curve;
}

}  // namespace denoise
