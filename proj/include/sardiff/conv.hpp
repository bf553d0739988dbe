#pragma once

#include <algorithm>
#include <cstddef>

#include "sardiff/errors.hpp"
#include "sardiff/tensor.hpp"

namespace sardiff {

// 3x3 cross-correlation, stride 1, zero padding 1 ("same" output size).
// input: Cin×H×W, kernels: Cout×Cin×3×3, bias: Cout -> Cout×H×W.
//
// The kernel is applied as nine shifted axpy passes so the inner loop runs
// contiguously over the row and vectorizes.
template <class T>
TensorT<T> conv2d(const TensorT<T>& input, const TensorT<T>& kernels, const TensorT<T>& bias) {
    require_rank(input, 3, "conv2d input");
    require_rank(kernels, 4, "conv2d kernels");
    require_rank(bias, 1, "conv2d bias");
    const std::size_t cin = input.shape[0], h = input.shape[1], w = input.shape[2];
    const std::size_t cout = kernels.shape[0];
    if (kernels.shape[1] != cin)
        throw DimensionError("conv2d: kernel input channels do not match input");
    if (kernels.shape[2] != 3 || kernels.shape[3] != 3)
        throw DimensionError("conv2d: kernels must be 3x3");
    if (bias.shape[0] != cout) throw DimensionError("conv2d: bias size does not match kernels");

    TensorT<T> out({cout, h, w});
    for (std::size_t co = 0; co < cout; ++co) {
        T* outc = &out.data[co * h * w];
        const T b = bias[co];
        for (std::size_t i = 0; i < h * w; ++i) outc[i] = b;
        for (std::size_t ci = 0; ci < cin; ++ci) {
            const T* inc = &input.data[ci * h * w];
            const T* k = &kernels.data[(co * cin + ci) * 9];
            for (int dy = -1; dy <= 1; ++dy) {
                const std::size_t y0 = static_cast<std::size_t>(std::max(0, -dy));
                const std::size_t y1 = h - static_cast<std::size_t>(std::max(0, dy));
                for (int dx = -1; dx <= 1; ++dx) {
                    const T kv = k[(dy + 1) * 3 + (dx + 1)];
                    const std::size_t x0 = static_cast<std::size_t>(std::max(0, -dx));
                    const std::size_t x1 = w - static_cast<std::size_t>(std::max(0, dx));
                    for (std::size_t y = y0; y < y1; ++y) {
                        T* orow = outc + y * w;
                        const T* irow = inc + (y + dy) * w + dx;
                        for (std::size_t x = x0; x < x1; ++x) orow[x] += kv * irow[x];
                    }
                }
            }
        }
    }
    return out;
}

// Gradient of conv2d w.r.t. its input: correlate grad_out with the kernel
// reflected through its center.
template <class T>
TensorT<T> conv2d_grad_input(const TensorT<T>& kernels, const TensorT<T>& grad_out) {
    const std::size_t cout = kernels.shape[0], cin = kernels.shape[1];
    const std::size_t h = grad_out.shape[1], w = grad_out.shape[2];
    TensorT<T> grad_in({cin, h, w});
    for (std::size_t ci = 0; ci < cin; ++ci) {
        T* gin = &grad_in.data[ci * h * w];
        for (std::size_t co = 0; co < cout; ++co) {
            const T* g = &grad_out.data[co * h * w];
            const T* k = &kernels.data[(co * cin + ci) * 9];
            for (int dy = -1; dy <= 1; ++dy) {
                const std::size_t y0 = static_cast<std::size_t>(std::max(0, dy));
                const std::size_t y1 = h - static_cast<std::size_t>(std::max(0, -dy));
                for (int dx = -1; dx <= 1; ++dx) {
                    const T kv = k[(dy + 1) * 3 + (dx + 1)];
                    const std::size_t x0 = static_cast<std::size_t>(std::max(0, dx));
                    const std::size_t x1 = w - static_cast<std::size_t>(std::max(0, -dx));
                    for (std::size_t y = y0; y < y1; ++y) {
                        T* grow = gin + y * w;
                        const T* srow = g + (y - dy) * w - dx;
                        for (std::size_t x = x0; x < x1; ++x) grow[x] += kv * srow[x];
                    }
                }
            }
        }
    }
    return grad_in;
}

// Accumulates kernel and bias gradients into the given stores (callers zero
// or batch-accumulate them as needed).
template <class T>
void conv2d_grad_params(const TensorT<T>& input, const TensorT<T>& grad_out,
                        TensorT<T>& grad_kernels, TensorT<T>& grad_bias) {
    const std::size_t cin = input.shape[0], h = input.shape[1], w = input.shape[2];
    const std::size_t cout = grad_out.shape[0];
    for (std::size_t co = 0; co < cout; ++co) {
        const T* g = &grad_out.data[co * h * w];
        double bacc = 0.0;
        for (std::size_t i = 0; i < h * w; ++i) bacc += static_cast<double>(g[i]);
        grad_bias[co] += static_cast<T>(bacc);
        for (std::size_t ci = 0; ci < cin; ++ci) {
            const T* inc = &input.data[ci * h * w];
            T* gk = &grad_kernels.data[(co * cin + ci) * 9];
            for (int dy = -1; dy <= 1; ++dy) {
                const std::size_t y0 = static_cast<std::size_t>(std::max(0, -dy));
                const std::size_t y1 = h - static_cast<std::size_t>(std::max(0, dy));
                for (int dx = -1; dx <= 1; ++dx) {
                    const std::size_t x0 = static_cast<std::size_t>(std::max(0, -dx));
                    const std::size_t x1 = w - static_cast<std::size_t>(std::max(0, dx));
                    double acc = 0.0;
                    for (std::size_t y = y0; y < y1; ++y) {
                        const T* grow = g + y * w;
                        const T* irow = inc + (y + dy) * w + dx;
                        for (std::size_t x = x0; x < x1; ++x)
                            acc += static_cast<double>(grow[x]) * static_cast<double>(irow[x]);
                    }
                    gk[(dy + 1) * 3 + (dx + 1)] += static_cast<T>(acc);
                }
            }
        }
    }
}

// 2x2 mean pooling (equals bilinear downsampling by a factor of two).
template <class T>
TensorT<T> avgpool2(const TensorT<T>& input) {
    require_rank(input, 3, "avgpool2");
    const std::size_t c = input.shape[0], h = input.shape[1], w = input.shape[2];
    if (h % 2 != 0 || w % 2 != 0) throw DimensionError("avgpool2: spatial extents must be even");
    TensorT<T> out({c, h / 2, w / 2});
    for (std::size_t ci = 0; ci < c; ++ci)
        for (std::size_t y = 0; y < h / 2; ++y)
            for (std::size_t x = 0; x < w / 2; ++x)
                out.at3(ci, y, x) =
                    (input.at3(ci, 2 * y, 2 * x) + input.at3(ci, 2 * y, 2 * x + 1) +
                     input.at3(ci, 2 * y + 1, 2 * x) + input.at3(ci, 2 * y + 1, 2 * x + 1)) /
                    static_cast<T>(4);
    return out;
}

template <class T>
TensorT<T> avgpool2_backward(const TensorT<T>& grad_out, std::size_t h, std::size_t w) {
    const std::size_t c = grad_out.shape[0];
    TensorT<T> grad_in({c, h, w});
    for (std::size_t ci = 0; ci < c; ++ci)
        for (std::size_t y = 0; y < h / 2; ++y)
            for (std::size_t x = 0; x < w / 2; ++x) {
                T v = grad_out.at3(ci, y, x) / static_cast<T>(4);
                grad_in.at3(ci, 2 * y, 2 * x) = v;
                grad_in.at3(ci, 2 * y, 2 * x + 1) = v;
                grad_in.at3(ci, 2 * y + 1, 2 * x) = v;
                grad_in.at3(ci, 2 * y + 1, 2 * x + 1) = v;
            }
    return grad_in;
}

template <class T>
TensorT<T> upsample_nearest2(const TensorT<T>& input) {
    require_rank(input, 3, "upsample_nearest2");
    const std::size_t c = input.shape[0], h = input.shape[1], w = input.shape[2];
    TensorT<T> out({c, 2 * h, 2 * w});
    for (std::size_t ci = 0; ci < c; ++ci)
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x) {
                T v = input.at3(ci, y, x);
                out.at3(ci, 2 * y, 2 * x) = v;
                out.at3(ci, 2 * y, 2 * x + 1) = v;
                out.at3(ci, 2 * y + 1, 2 * x) = v;
                out.at3(ci, 2 * y + 1, 2 * x + 1) = v;
            }
    return out;
}

template <class T>
TensorT<T> upsample_nearest2_backward(const TensorT<T>& grad_out) {
    const std::size_t c = grad_out.shape[0], h = grad_out.shape[1] / 2, w = grad_out.shape[2] / 2;
    TensorT<T> grad_in({c, h, w});
    for (std::size_t ci = 0; ci < c; ++ci)
        for (std::size_t y = 0; y < h; ++y)
            for (std::size_t x = 0; x < w; ++x)
                grad_in.at3(ci, y, x) =
                    grad_out.at3(ci, 2 * y, 2 * x) + grad_out.at3(ci, 2 * y, 2 * x + 1) +
                    grad_out.at3(ci, 2 * y + 1, 2 * x) + grad_out.at3(ci, 2 * y + 1, 2 * x + 1);
    return grad_in;
}

}  // namespace sardiff
