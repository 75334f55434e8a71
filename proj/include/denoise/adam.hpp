#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "denoise/errors.hpp"
#include "denoise/model.hpp"

namespace denoise {

/// Adam hyperparameters; the defaults are the ones recommended alongside
/// the algorithm.
struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First/second moment accumulators per parameter, plus the shared step
/// counter. One call to adam_step advances t by exactly 1.
template <typename T>
struct AdamState {
    std::vector<std::vector<T>> m;
    std::vector<std::vector<T>> v;
    std::uint64_t t = 0;
    AdamConfig cfg;

    static AdamState for_params(const std::vector<ParamRef<T>>& refs, AdamConfig cfg = {}) {
        AdamState s;
        s.cfg = cfg;
        for (const auto& ref : refs) {
            s.m.emplace_back(ref.values->size(), T(0));
            s.v.emplace_back(ref.values->size(), T(0));
        }
        return s;
    }
};

namespace detail {

template <typename T>
void adam_update_span(T* params, const T* grads, T* m, T* v, std::size_t n,
                      const AdamConfig& cfg, std::uint64_t t) {
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < n; ++i) {
        const double g = static_cast<double>(grads[i]);
        const double mi = cfg.beta1 * static_cast<double>(m[i]) + (1.0 - cfg.beta1) * g;
        const double vi = cfg.beta2 * static_cast<double>(v[i]) + (1.0 - cfg.beta2) * g * g;
        m[i] = static_cast<T>(mi);
        v[i] = static_cast<T>(vi);
        const double m_hat = mi / bc1;
        const double v_hat = vi / bc2;
        params[i] = static_cast<T>(static_cast<double>(params[i]) -
                                   cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon));
    }
}

}  // namespace detail

/// One optimizer step over a whole parameter set.
template <typename T>
void adam_step(const std::vector<ParamRef<T>>& params, const ModelGrads<T>& grads,
               AdamState<T>& state) {
    if (params.size() != grads.tensors.size() || params.size() != state.m.size())
        throw ShapeMismatch("adam_step: parameter/gradient/state tensor counts differ");
    ++state.t;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].values->size() != grads.tensors[i].size())
            throw ShapeMismatch("adam_step: gradient shape differs for " + params[i].name);
        detail::adam_update_span(params[i].values->data(), grads.tensors[i].data(),
                                 state.m[i].data(), state.v[i].data(),
                                 params[i].values->size(), state.cfg, state.t);
    }
}

/// Single-tensor convenience form.
template <typename T>
struct AdamStateSingle {
    std::vector<T> m;
    std::vector<T> v;
    std::uint64_t t = 0;
    AdamConfig cfg;

    explicit AdamStateSingle(std::size_t n, AdamConfig c = {})
        : m(n, T(0)), v(n, T(0)), cfg(c) {}
};

template <typename T>
void adam_step(std::vector<T>& params, const std::vector<T>& grads, AdamStateSingle<T>& state) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw ShapeMismatch("adam_step: shapes differ");
    ++state.t;
    detail::adam_update_span(params.data(), grads.data(), state.m.data(), state.v.data(),
                             params.size(), state.cfg, state.t);
}

}  // namespace denoise
