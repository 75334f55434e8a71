#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "denoise/model.hpp"
#include "denoise/tensor.hpp"

namespace denoise {

/// Denoise a whole normalized signal with windowed inference: consecutive
/// windows of `window_len`, stitched without overlap. The trailing partial
/// window is zero-padded up to the model's length multiple and the padding
/// trimmed from the result, so output length always equals input length.
template <typename T>
std::vector<T> denoise_signal(const Autoencoder<T>& model, const std::vector<T>& normalized,
                              std::size_t window_len) {
    const std::size_t multiple = model.arch.length_multiple();
    if (window_len == 0 || window_len % multiple != 0)
        throw LengthNotDivisible("denoise_signal: window_len must be a positive multiple of " +
                                 std::to_string(multiple));

    std::vector<T> out;
    out.reserve(normalized.size());
    std::size_t pos = 0;
    while (pos < normalized.size()) {
        const std::size_t remaining = normalized.size() - pos;
        const std::size_t chunk = std::min(window_len, remaining);
        const std::size_t padded = ((chunk + multiple - 1) / multiple) * multiple;

        Tensor3<T> x(1, padded, 1);
        std::copy(normalized.begin() + pos, normalized.begin() + pos + chunk, x.data.begin());
        const ForwardCache<T> cache = model_forward(model, x);
        out.insert(out.end(), cache.output.data.begin(), cache.output.data.begin() + chunk);
        pos += chunk;
    }
    return out;
}

}  // namespace denoise
