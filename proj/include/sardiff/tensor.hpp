#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "sardiff/errors.hpp"

namespace sardiff {

// Dense row-major tensor over real scalars. TensorT<float> is the working
// type for all model state; the double instantiation exists so tests can
// re-evaluate forward passes at higher precision.
template <class T>
struct TensorT {
    std::vector<std::size_t> shape;
    std::vector<T> data;

    TensorT() = default;

    explicit TensorT(std::vector<std::size_t> s, T fill = T(0)) : shape(std::move(s)) {
        data.assign(checked_numel(shape), fill);
    }

    TensorT(std::vector<std::size_t> s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {
        if (checked_numel(shape) != data.size())
            throw DimensionError("tensor data length does not match shape product");
    }

    static std::size_t checked_numel(const std::vector<std::size_t>& s) {
        if (s.empty()) throw DimensionError("tensor shape must be non-empty");
        std::size_t n = 1;
        for (std::size_t e : s) {
            if (e == 0) throw DimensionError("tensor extents must be positive");
            if (e > 0 && n > SIZE_MAX / e) throw DimensionError("tensor shape product overflows");
            n *= e;
        }
        return n;
    }

    std::size_t numel() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }

    T& operator[](std::size_t i) { return data[i]; }
    const T& operator[](std::size_t i) const { return data[i]; }

    // (h, w) indexing for rank-2 tensors.
    T& at2(std::size_t h, std::size_t w) { return data[h * shape[1] + w]; }
    const T& at2(std::size_t h, std::size_t w) const { return data[h * shape[1] + w]; }

    // (c, h, w) indexing for rank-3 tensors.
    T& at3(std::size_t c, std::size_t h, std::size_t w) {
        return data[(c * shape[1] + h) * shape[2] + w];
    }
    const T& at3(std::size_t c, std::size_t h, std::size_t w) const {
        return data[(c * shape[1] + h) * shape[2] + w];
    }

    bool same_shape(const TensorT& o) const { return shape == o.shape; }

    bool all_finite() const {
        for (T v : data)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

    void fill(T v) { data.assign(data.size(), v); }

    // 64-bit accumulation keeps reduction error independent of tensor size.
    double sum() const {
        double acc = 0.0;
        for (T v : data) acc += static_cast<double>(v);
        return acc;
    }

    double sum_squares() const {
        double acc = 0.0;
        for (T v : data) acc += static_cast<double>(v) * static_cast<double>(v);
        return acc;
    }

    double mean() const { return sum() / static_cast<double>(numel()); }

    template <class U>
    TensorT<U> cast() const {
        TensorT<U> out(shape);
        for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
        return out;
    }
};

using Tensor = TensorT<float>;

template <class T>
void require_rank(const TensorT<T>& t, std::size_t rank, const std::string& what) {
    if (t.rank() != rank)
        throw DimensionError(what + ": expected rank " + std::to_string(rank) + ", got " +
                             std::to_string(t.rank()));
}

template <class T>
void require_same_shape(const TensorT<T>& a, const TensorT<T>& b, const std::string& what) {
    if (!a.same_shape(b)) throw DimensionError(what + ": shape mismatch");
}

}  // namespace sardiff
