#pragma once

#include <cmath>
#include <cstddef>

#include "sardiff/errors.hpp"
#include "sardiff/tensor.hpp"

namespace sardiff {

// Temperature softmax over the channel axis (axis 0). A rank-1 tensor is one
// position with C entries; a C×H×W tensor is softmaxed per pixel. Max
// subtraction keeps exp() in range for any finite logits.
template <class T>
TensorT<T> softmax(const TensorT<T>& logits, double temperature) {
    if (!(temperature > 0.0)) throw ParameterError("softmax: temperature must be > 0");
    const std::size_t channels = logits.shape[0];
    const std::size_t positions = logits.numel() / channels;
    TensorT<T> out(logits.shape);
    for (std::size_t p = 0; p < positions; ++p) {
        double maxv = -HUGE_VAL;
        for (std::size_t c = 0; c < channels; ++c)
            maxv = std::max(maxv, static_cast<double>(logits[c * positions + p]));
        double denom = 0.0;
        for (std::size_t c = 0; c < channels; ++c)
            denom += std::exp((static_cast<double>(logits[c * positions + p]) - maxv) / temperature);
        for (std::size_t c = 0; c < channels; ++c) {
            double e = std::exp((static_cast<double>(logits[c * positions + p]) - maxv) / temperature);
            out[c * positions + p] = static_cast<T>(e / denom);
        }
    }
    return out;
}

template <class T>
T sigmoid(T x) {
    return static_cast<T>(1) / (static_cast<T>(1) + std::exp(-x));
}

// Sigmoid-weighted linear unit, the one activation used by the networks.
template <class T>
TensorT<T> silu(const TensorT<T>& x) {
    TensorT<T> out(x.shape);
    for (std::size_t i = 0; i < x.numel(); ++i) out[i] = x[i] * sigmoid(x[i]);
    return out;
}

// d silu / dx = s(x) * (1 + x * (1 - s(x)))
template <class T>
TensorT<T> silu_backward(const TensorT<T>& x, const TensorT<T>& grad_out) {
    TensorT<T> out(x.shape);
    for (std::size_t i = 0; i < x.numel(); ++i) {
        T s = sigmoid(x[i]);
        out[i] = grad_out[i] * s * (static_cast<T>(1) + x[i] * (static_cast<T>(1) - s));
    }
    return out;
}

}  // namespace sardiff
