#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "sardiff/tensor.hpp"

namespace sardiff {

// Full complex DFT of a real H×W field, double precision. For real input the
// bins obey conjugate symmetry F(u,v) = conj(F((H-u) mod H, (W-v) mod W)).
struct Spectrum {
    std::size_t h = 0, w = 0;
    std::vector<double> re, im;

    double& real(std::size_t u, std::size_t v) { return re[u * w + v]; }
    double& imag(std::size_t u, std::size_t v) { return im[u * w + v]; }
    double real(std::size_t u, std::size_t v) const { return re[u * w + v]; }
    double imag(std::size_t u, std::size_t v) const { return im[u * w + v]; }
};

namespace detail {

// Twiddle table exp(-2*pi*i*k/n) for k in [0, n).
struct Twiddle {
    std::vector<double> cos_, sin_;
    explicit Twiddle(std::size_t n) : cos_(n), sin_(n) {
        for (std::size_t k = 0; k < n; ++k) {
            double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            cos_[k] = std::cos(a);
            sin_[k] = std::sin(a);
        }
    }
};

}  // namespace detail

// Exact 2-D DFT, evaluated as a row transform followed by a column transform
// (same sums as the direct double sum, O(HW(H+W)) instead of O((HW)^2)).
template <class T>
Spectrum dft2(const TensorT<T>& field) {
    require_rank(field, 2, "dft2");
    if (!field.all_finite()) throw ValidationError("dft2: input contains non-finite values");
    const std::size_t h = field.shape[0], w = field.shape[1];
    detail::Twiddle tw_w(w), tw_h(h);

    // Row pass: G(r, v) = sum_c x(r, c) * exp(-2pi i c v / W)
    std::vector<double> gre(h * w, 0.0), gim(h * w, 0.0);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t v = 0; v < w; ++v) {
            double sre = 0.0, sim = 0.0;
            for (std::size_t c = 0; c < w; ++c) {
                double x = static_cast<double>(field.at2(r, c));
                std::size_t k = (c * v) % w;
                sre += x * tw_w.cos_[k];
                sim += x * tw_w.sin_[k];
            }
            gre[r * w + v] = sre;
            gim[r * w + v] = sim;
        }
    }

    // Column pass: F(u, v) = sum_r G(r, v) * exp(-2pi i r u / H)
    Spectrum out;
    out.h = h;
    out.w = w;
    out.re.assign(h * w, 0.0);
    out.im.assign(h * w, 0.0);
    for (std::size_t u = 0; u < h; ++u) {
        for (std::size_t v = 0; v < w; ++v) {
            double sre = 0.0, sim = 0.0;
            for (std::size_t r = 0; r < h; ++r) {
                std::size_t k = (r * u) % h;
                double c = tw_h.cos_[k], s = tw_h.sin_[k];
                sre += gre[r * w + v] * c - gim[r * w + v] * s;
                sim += gre[r * w + v] * s + gim[r * w + v] * c;
            }
            out.real(u, v) = sre;
            out.imag(u, v) = sim;
        }
    }
    return out;
}

// Inverse transform; returns the real part (input spectra here always come
// from real fields).
inline Tensor idft2(const Spectrum& spec) {
    const std::size_t h = spec.h, w = spec.w;
    detail::Twiddle tw_w(w), tw_h(h);
    std::vector<double> gre(h * w, 0.0), gim(h * w, 0.0);
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t v = 0; v < w; ++v) {
            double sre = 0.0, sim = 0.0;
            for (std::size_t u = 0; u < h; ++u) {
                std::size_t k = (r * u) % h;
                // conjugated twiddle gives the forward-inverse pair
                double c = tw_h.cos_[k], s = -tw_h.sin_[k];
                sre += spec.real(u, v) * c - spec.imag(u, v) * s;
                sim += spec.real(u, v) * s + spec.imag(u, v) * c;
            }
            gre[r * w + v] = sre;
            gim[r * w + v] = sim;
        }
    }
    Tensor out({h, w});
    const double inv = 1.0 / (static_cast<double>(h) * static_cast<double>(w));
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            double sre = 0.0;
            for (std::size_t v = 0; v < w; ++v) {
                std::size_t k = (c * v) % w;
                sre += gre[r * w + v] * tw_w.cos_[k] + gim[r * w + v] * tw_w.sin_[k];
            }
            out.at2(r, c) = static_cast<float>(sre * inv);
        }
    }
    return out;
}

// Mean over all bins of |F(u,v)|^2. Equals the spatial sum of squares by
// Parseval, which the tests exploit as an independent oracle.
template <class T>
double mean_power(const TensorT<T>& field) {
    Spectrum spec = dft2(field);
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.re.size(); ++i)
        acc += spec.re[i] * spec.re[i] + spec.im[i] * spec.im[i];
    return acc / static_cast<double>(spec.re.size());
}

}  // namespace sardiff
