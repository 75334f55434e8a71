#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "denoise/errors.hpp"
#include "denoise/tensor.hpp"

namespace denoise {

/// Predictions are clamped to [kBceClamp, 1 - kBceClamp] so the logs stay
/// finite for inputs on the closed interval [0, 1].
constexpr double kBceClamp = 1e-7;

/// Binary cross-entropy, mean over every scalar element. Valid for targets
/// in [0,1]; note the loss of a non-binary target has a nonzero floor.
template <typename T>
double bce_loss(const std::vector<T>& target, const std::vector<T>& prediction) {
    if (target.size() != prediction.size())
        throw ShapeMismatch("bce_loss: target and prediction sizes differ");
    if (target.empty()) throw ShapeMismatch("bce_loss: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double y = static_cast<double>(target[i]);
        double p = static_cast<double>(prediction[i]);
        p = p < kBceClamp ? kBceClamp : (p > 1.0 - kBceClamp ? 1.0 - kBceClamp : p);
        acc += y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    }
    return -acc / static_cast<double>(target.size());
}

/// d(bce)/d(prediction), elementwise, with the same clamping. Composed with
/// the sigmoid head derivative the end-to-end gradient is (p - y) / N.
template <typename T>
std::vector<T> bce_grad(const std::vector<T>& target, const std::vector<T>& prediction) {
    if (target.size() != prediction.size())
        throw ShapeMismatch("bce_grad: target and prediction sizes differ");
    if (target.empty()) throw ShapeMismatch("bce_grad: empty input");
    std::vector<T> grad(target.size());
    const double inv_n = 1.0 / static_cast<double>(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double y = static_cast<double>(target[i]);
        double p = static_cast<double>(prediction[i]);
        p = p < kBceClamp ? kBceClamp : (p > 1.0 - kBceClamp ? 1.0 - kBceClamp : p);
        grad[i] = static_cast<T>(inv_n * (-y / p + (1.0 - y) / (1.0 - p)));
    }
    return grad;
}

/// d(mse)/d(prediction), elementwise.
template <typename T>
std::vector<T> mse_grad(const std::vector<T>& target, const std::vector<T>& prediction) {
    if (target.size() != prediction.size())
        throw ShapeMismatch("mse_grad: target and prediction sizes differ");
    if (target.empty()) throw ShapeMismatch("mse_grad: empty input");
    std::vector<T> grad(target.size());
    const double scale = 2.0 / static_cast<double>(target.size());
    for (std::size_t i = 0; i < target.size(); ++i)
        grad[i] = static_cast<T>(scale * (static_cast<double>(prediction[i]) -
                                          static_cast<double>(target[i])));
    return grad;
}

/// Mean squared difference.
template <typename T>
double mse_loss(const std::vector<T>& target, const std::vector<T>& prediction) {
    if (target.size() != prediction.size())
        throw ShapeMismatch("mse_loss: target and prediction sizes differ");
    if (target.empty()) throw ShapeMismatch("mse_loss: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double d = static_cast<double>(target[i]) - static_cast<double>(prediction[i]);
        acc += d * d;
    }
    return acc / static_cast<double>(target.size());
}

template <typename T>
double bce_loss(const Tensor3<T>& target, const Tensor3<T>& prediction) {
    if (!target.same_shape(prediction))
        throw ShapeMismatch("bce_loss: tensor shapes differ");
    return bce_loss(target.data, prediction.data);
}

template <typename T>
Tensor3<T> bce_grad(const Tensor3<T>& target, const Tensor3<T>& prediction) {
    if (!target.same_shape(prediction))
        throw ShapeMismatch("bce_grad: tensor shapes differ");
    Tensor3<T> grad(prediction.batch, prediction.length, prediction.channels);
    grad.data = bce_grad(target.data, prediction.data);
    return grad;
}

}  // namespace denoise
