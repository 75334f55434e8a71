#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "denoise/errors.hpp"

namespace denoise {

/// Contiguous (batch, length, channels) tensor, channels fastest.
template <typename T>
struct Tensor3 {
    std::vector<T> data;
    std::size_t batch = 0;
    std::size_t length = 0;
    std::size_t channels = 0;

    Tensor3() = default;
    Tensor3(std::size_t b, std::size_t l, std::size_t c)
        : data(b * l * c, T(0)), batch(b), length(l), channels(c) {}

    std::size_t size() const { return data.size(); }

    T& at(std::size_t b, std::size_t t, std::size_t c) {
        return data[(b * length + t) * channels + c];
    }
    T at(std::size_t b, std::size_t t, std::size_t c) const {
        return data[(b * length + t) * channels + c];
    }

    bool same_shape(const Tensor3& o) const {
        return batch == o.batch && length == o.length && channels == o.channels;
    }

    bool all_finite() const {
        for (const T& v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }
};

}  // namespace denoise
