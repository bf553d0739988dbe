#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sardiff/conv.hpp"
#include "sardiff/ops.hpp"
#include "sardiff/rng.hpp"
#include "sardiff/tensor.hpp"

namespace sardiff {

// Fully convolutional encoder-decoder shared by the joint denoiser and the
// student segmenter:
//
//   stem conv (in -> W)
//   enc1, enc2   residual blocks at full resolution
//   down         2x mean-pool + conv (W -> 2W)
//   mid1, mid2   residual blocks at half resolution
//   up           2x nearest-upsample + conv (2W -> W)
//   dec1, dec2   residual blocks at full resolution
//   head conv (W -> out), zero-initialized
//
// Every block except stem/head adds a timestep-conditioning bias per channel
// (sinusoidal embedding of dim E through a learned linear map) after its
// first conv. embed_dim == 0 turns conditioning off entirely (student mode).
// Activation is SiLU throughout; no normalization layers.
template <class T>
struct ConvNetT {
    struct Conv {
        TensorT<T> w, b;
    };
    struct TProj {
        TensorT<T> w, b;  // (channels×E), (channels); empty when E == 0
    };
    struct Res {
        Conv c1, c2;
        TProj t;
    };
    struct Samp {
        Conv c;
        TProj t;
    };

    int in_channels = 0, out_channels = 0, width = 0, embed_dim = 0;
    Conv stem;
    Res enc1, enc2;
    Samp down;
    Res mid1, mid2;
    Samp up;
    Res dec1, dec2;
    Conv head;

    template <class Fn>
    void visit(Fn&& fn) {
        auto conv = [&](const char* name, Conv& c) {
            fn(std::string(name) + ".w", c.w);
            fn(std::string(name) + ".b", c.b);
        };
        auto tproj = [&](const char* name, TProj& t) {
            if (embed_dim == 0) return;
            fn(std::string(name) + ".t.w", t.w);
            fn(std::string(name) + ".t.b", t.b);
        };
        auto res = [&](const char* name, Res& r) {
            fn(std::string(name) + ".c1.w", r.c1.w);
            fn(std::string(name) + ".c1.b", r.c1.b);
            fn(std::string(name) + ".c2.w", r.c2.w);
            fn(std::string(name) + ".c2.b", r.c2.b);
            tproj(name, r.t);
        };
        auto samp = [&](const char* name, Samp& s) {
            fn(std::string(name) + ".c.w", s.c.w);
            fn(std::string(name) + ".c.b", s.c.b);
            tproj(name, s.t);
        };
        conv("stem", stem);
        res("enc1", enc1);
        res("enc2", enc2);
        samp("down", down);
        res("mid1", mid1);
        res("mid2", mid2);
        samp("up", up);
        res("dec1", dec1);
        res("dec2", dec2);
        conv("head", head);
    }

    std::vector<TensorT<T>*> collect() {
        std::vector<TensorT<T>*> out;
        visit([&](const std::string&, TensorT<T>& t) { out.push_back(&t); });
        return out;
    }

    std::size_t param_count() {
        std::size_t n = 0;
        visit([&](const std::string&, TensorT<T>& t) { n += t.numel(); });
        return n;
    }

    // Same topology with all parameters zero; gradient and moment stores.
    ConvNetT zero_clone() const {
        ConvNetT z = *this;
        z.visit([](const std::string&, TensorT<T>& t) { t.fill(T(0)); });
        return z;
    }

    template <class U>
    ConvNetT<U> cast() const {
        ConvNetT<U> out;
        out.in_channels = in_channels;
        out.out_channels = out_channels;
        out.width = width;
        out.embed_dim = embed_dim;
        auto* self = const_cast<ConvNetT*>(this);
        std::vector<TensorT<T>*> src = self->collect();
        std::vector<TensorT<U>*> dst = out.collect();
        for (std::size_t i = 0; i < src.size(); ++i) *dst[i] = src[i]->template cast<U>();
        return out;
    }
};

using ConvNet = ConvNetT<float>;

namespace netinit {

template <class T>
void fill_normal(TensorT<T>& t, Rng& rng, double scale) {
    for (auto& v : t.data) v = static_cast<T>(rng.normal() * scale);
}

}  // namespace netinit

// Seeded initialization: conv weights ~ N(0, 1/fan_in), time projections
// ~ N(0, 1/E), biases zero, head zero so the untrained net predicts zero.
template <class T>
ConvNetT<T> make_convnet(int in_channels, int out_channels, int width, int embed_dim, Rng& rng) {
    if (in_channels < 1 || out_channels < 1 || width < 1)
        throw ParameterError("make_convnet: channel counts must be positive");
    if (embed_dim < 0 || embed_dim % 2 != 0)
        throw ParameterError("make_convnet: embed_dim must be even (0 disables conditioning)");
    ConvNetT<T> n;
    n.in_channels = in_channels;
    n.out_channels = out_channels;
    n.width = width;
    n.embed_dim = embed_dim;
    const std::size_t w = static_cast<std::size_t>(width);
    const std::size_t e = static_cast<std::size_t>(embed_dim);

    auto conv_shape = [&](auto& c, std::size_t cout, std::size_t cin) {
        c.w = TensorT<T>({cout, cin, 3, 3});
        c.b = TensorT<T>({cout});
    };
    auto tproj_shape = [&](auto& t, std::size_t channels) {
        if (embed_dim == 0) return;
        t.w = TensorT<T>({channels, e});
        t.b = TensorT<T>({channels});
    };
    auto res_shape = [&](auto& r, std::size_t channels) {
        conv_shape(r.c1, channels, channels);
        conv_shape(r.c2, channels, channels);
        tproj_shape(r.t, channels);
    };
    conv_shape(n.stem, w, static_cast<std::size_t>(in_channels));
    res_shape(n.enc1, w);
    res_shape(n.enc2, w);
    conv_shape(n.down.c, 2 * w, w);
    tproj_shape(n.down.t, 2 * w);
    res_shape(n.mid1, 2 * w);
    res_shape(n.mid2, 2 * w);
    conv_shape(n.up.c, w, 2 * w);
    tproj_shape(n.up.t, w);
    res_shape(n.dec1, w);
    res_shape(n.dec2, w);
    conv_shape(n.head, static_cast<std::size_t>(out_channels), w);

    n.visit([&](const std::string& name, TensorT<T>& t) {
        if (name.rfind("head", 0) == 0) return;             // stays zero
        if (name.size() >= 2 && name.compare(name.size() - 2, 2, ".b") == 0) return;
        if (name.find(".t.w") != std::string::npos)
            netinit::fill_normal(t, rng, std::sqrt(1.0 / embed_dim));
        else
            netinit::fill_normal(t, rng, std::sqrt(1.0 / static_cast<double>(t.shape[1] * 9)));
    });
    return n;
}

// Sinusoidal timestep embedding; frequencies span 1 .. 1/10000 log-uniformly.
template <class T>
std::vector<T> time_embedding(int t, int embed_dim) {
    std::vector<T> emb(static_cast<std::size_t>(embed_dim));
    const int half = embed_dim / 2;
    for (int i = 0; i < half; ++i) {
        double freq = std::exp(-std::log(10000.0) * i / std::max(half - 1, 1));
        emb[static_cast<std::size_t>(i)] = static_cast<T>(std::sin(t * freq));
        emb[static_cast<std::size_t>(half + i)] = static_cast<T>(std::cos(t * freq));
    }
    return emb;
}

template <class T>
struct NetCacheT {
    TensorT<T> input;
    std::vector<T> emb;
    TensorT<T> stem_out;
    struct ResC {
        TensorT<T> h1, a, out;  // pre-activation, activation, block output
    };
    struct SampC {
        TensorT<T> resampled, h, out;
    };
    ResC e1, e2, m1, m2, c1, c2;
    SampC d, u;
};

using NetCache = NetCacheT<float>;

namespace detail {

template <class T>
void add_time_bias(TensorT<T>& h, const typename ConvNetT<T>::TProj& proj,
                   const std::vector<T>& emb) {
    if (emb.empty()) return;
    const std::size_t channels = h.shape[0], plane = h.shape[1] * h.shape[2];
    const std::size_t e = emb.size();
    for (std::size_t c = 0; c < channels; ++c) {
        double bias = static_cast<double>(proj.b[c]);
        for (std::size_t i = 0; i < e; ++i)
            bias += static_cast<double>(proj.w[c * e + i]) * static_cast<double>(emb[i]);
        T bf = static_cast<T>(bias);
        T* row = &h.data[c * plane];
        for (std::size_t i = 0; i < plane; ++i) row[i] += bf;
    }
}

// Gradient of the per-channel time bias: the spatial sum of the upstream
// gradient per channel feeds both the projection weight (outer product with
// the embedding) and its bias.
template <class T>
void time_bias_grads(const TensorT<T>& grad_h, const std::vector<T>& emb,
                     typename ConvNetT<T>::TProj& grad_proj) {
    if (emb.empty()) return;
    const std::size_t channels = grad_h.shape[0], plane = grad_h.shape[1] * grad_h.shape[2];
    const std::size_t e = emb.size();
    for (std::size_t c = 0; c < channels; ++c) {
        double sum = 0.0;
        const T* row = &grad_h.data[c * plane];
        for (std::size_t i = 0; i < plane; ++i) sum += static_cast<double>(row[i]);
        grad_proj.b[c] += static_cast<T>(sum);
        for (std::size_t i = 0; i < e; ++i)
            grad_proj.w[c * e + i] += static_cast<T>(sum * static_cast<double>(emb[i]));
    }
}

template <class T>
TensorT<T> res_forward(const typename ConvNetT<T>::Res& r, const TensorT<T>& x,
                       const std::vector<T>& emb, typename NetCacheT<T>::ResC& c) {
    c.h1 = conv2d(x, r.c1.w, r.c1.b);
    add_time_bias(c.h1, r.t, emb);
    c.a = silu(c.h1);
    TensorT<T> h2 = conv2d(c.a, r.c2.w, r.c2.b);
    c.out = TensorT<T>(x.shape);
    for (std::size_t i = 0; i < x.numel(); ++i) c.out[i] = x[i] + h2[i];
    return c.out;
}

template <class T>
TensorT<T> res_backward(const typename ConvNetT<T>::Res& r, const TensorT<T>& x,
                        const typename NetCacheT<T>::ResC& c, const TensorT<T>& grad_out,
                        const std::vector<T>& emb, typename ConvNetT<T>::Res& grads) {
    conv2d_grad_params(c.a, grad_out, grads.c2.w, grads.c2.b);
    TensorT<T> grad_a = conv2d_grad_input(r.c2.w, grad_out);
    TensorT<T> grad_h1 = silu_backward(c.h1, grad_a);
    time_bias_grads(grad_h1, emb, grads.t);
    conv2d_grad_params(x, grad_h1, grads.c1.w, grads.c1.b);
    TensorT<T> grad_x = conv2d_grad_input(r.c1.w, grad_h1);
    for (std::size_t i = 0; i < grad_x.numel(); ++i) grad_x[i] += grad_out[i];  // skip path
    return grad_x;
}

}  // namespace detail

// Deterministic forward pass; H and W must be divisible by 2. t is ignored
// when the net is unconditioned (embed_dim == 0).
template <class T>
TensorT<T> net_forward(const ConvNetT<T>& n, const TensorT<T>& input, int t, NetCacheT<T>& cache) {
    require_rank(input, 3, "net_forward input");
    if (input.shape[0] != static_cast<std::size_t>(n.in_channels))
        throw DimensionError("net_forward: input channel count mismatch");
    if (input.shape[1] % 2 != 0 || input.shape[2] % 2 != 0)
        throw DimensionError("net_forward: spatial extents must be divisible by 2");

    cache.input = input;
    cache.emb = n.embed_dim > 0 ? time_embedding<T>(t, n.embed_dim) : std::vector<T>{};
    cache.stem_out = conv2d(input, n.stem.w, n.stem.b);

    TensorT<T> x = detail::res_forward(n.enc1, cache.stem_out, cache.emb, cache.e1);
    x = detail::res_forward(n.enc2, x, cache.emb, cache.e2);

    cache.d.resampled = avgpool2(x);
    cache.d.h = conv2d(cache.d.resampled, n.down.c.w, n.down.c.b);
    detail::add_time_bias(cache.d.h, n.down.t, cache.emb);
    cache.d.out = silu(cache.d.h);

    x = detail::res_forward(n.mid1, cache.d.out, cache.emb, cache.m1);
    x = detail::res_forward(n.mid2, x, cache.emb, cache.m2);

    cache.u.resampled = upsample_nearest2(x);
    cache.u.h = conv2d(cache.u.resampled, n.up.c.w, n.up.c.b);
    detail::add_time_bias(cache.u.h, n.up.t, cache.emb);
    cache.u.out = silu(cache.u.h);

    x = detail::res_forward(n.dec1, cache.u.out, cache.emb, cache.c1);
    x = detail::res_forward(n.dec2, x, cache.emb, cache.c2);
    return conv2d(x, n.head.w, n.head.b);
}

template <class T>
TensorT<T> net_forward(const ConvNetT<T>& n, const TensorT<T>& input, int t = 0) {
    NetCacheT<T> cache;
    return net_forward(n, input, t, cache);
}

// Exact reverse-mode gradients of net_forward, accumulated into `grads`
// (same topology, typically a zero_clone).
template <class T>
void net_backward(const ConvNetT<T>& n, const NetCacheT<T>& cache, const TensorT<T>& grad_output,
                  ConvNetT<T>& grads) {
    conv2d_grad_params(cache.c2.out, grad_output, grads.head.w, grads.head.b);
    TensorT<T> g = conv2d_grad_input(n.head.w, grad_output);

    g = detail::res_backward(n.dec2, cache.c1.out, cache.c2, g, cache.emb, grads.dec2);
    g = detail::res_backward(n.dec1, cache.u.out, cache.c1, g, cache.emb, grads.dec1);

    TensorT<T> grad_uh = silu_backward(cache.u.h, g);
    detail::time_bias_grads(grad_uh, cache.emb, grads.up.t);
    conv2d_grad_params(cache.u.resampled, grad_uh, grads.up.c.w, grads.up.c.b);
    g = upsample_nearest2_backward(conv2d_grad_input(n.up.c.w, grad_uh));

    g = detail::res_backward(n.mid2, cache.m1.out, cache.m2, g, cache.emb, grads.mid2);
    g = detail::res_backward(n.mid1, cache.d.out, cache.m1, g, cache.emb, grads.mid1);

    TensorT<T> grad_dh = silu_backward(cache.d.h, g);
    detail::time_bias_grads(grad_dh, cache.emb, grads.down.t);
    conv2d_grad_params(cache.d.resampled, grad_dh, grads.down.c.w, grads.down.c.b);
    g = avgpool2_backward(conv2d_grad_input(n.down.c.w, grad_dh), cache.e2.out.shape[1],
                          cache.e2.out.shape[2]);

    g = detail::res_backward(n.enc2, cache.e1.out, cache.e2, g, cache.emb, grads.enc2);
    g = detail::res_backward(n.enc1, cache.stem_out, cache.e1, g, cache.emb, grads.enc1);
    conv2d_grad_params(cache.input, g, grads.stem.w, grads.stem.b);
}

}  // namespace sardiff
