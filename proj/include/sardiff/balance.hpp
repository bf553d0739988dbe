#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sardiff/fourier.hpp"
#include "sardiff/manifest.hpp"
#include "sardiff/tensor.hpp"

namespace sardiff {

// Scalar that equalizes the SNR of the two modalities under the shared noise
// schedule: b = sqrt(pooled image power / pooled mask power), with powers
// normalized per element so single-channel images compare against C-channel
// masks. Computed once per dataset.
struct BalancingFactor {
    double b = 0.0;
    double power_image = 0.0;  // pooled per-element mean power of images
    double power_mask = 0.0;   // pooled per-element mean power of ±1 masks
    std::string dataset_id;
    std::size_t num_samples = 0;
};

inline nlohmann::json to_json(const BalancingFactor& f) {
    return {{"b", f.b},
            {"power_image", f.power_image},
            {"power_mask", f.power_mask},
            {"dataset_id", f.dataset_id},
            {"num_samples", f.num_samples}};
}

inline BalancingFactor balancing_factor_from_json(const nlohmann::json& j) {
    BalancingFactor f;
    f.b = j.at("b").get<double>();
    f.power_image = j.at("power_image").get<double>();
    f.power_mask = j.at("power_mask").get<double>();
    f.dataset_id = j.value("dataset_id", std::string{});
    f.num_samples = j.value("num_samples", std::size_t{0});
    return f;
}

// Two algebraically equal routes to a channel's total power. The spectral
// route sums |F(u,v)|^2 / (HW) over the DFT bins; the spatial route uses the
// Parseval identity directly. Tests assert their agreement.
enum class PowerRoute { spectral, spatial };

namespace detail {

// Total power of one 2-D channel (== spatial sum of squares).
template <class T>
double channel_power(const TensorT<T>& channel, PowerRoute route) {
    if (route == PowerRoute::spectral) return mean_power(channel);
    return channel.sum_squares();
}

template <class T>
double stack_power(const TensorT<T>& chw, PowerRoute route) {
    require_rank(chw, 3, "stack_power");
    double acc = 0.0;
    const std::size_t c = chw.shape[0], h = chw.shape[1], w = chw.shape[2];
    for (std::size_t ci = 0; ci < c; ++ci) {
        TensorT<T> plane({h, w});
        std::copy(chw.data.begin() + ci * h * w, chw.data.begin() + (ci + 1) * h * w,
                  plane.data.begin());
        acc += channel_power(plane, route);
    }
    return acc;
}

}  // namespace detail

// One-hot {0,1} -> {-1,+1} via 2v - 1. Rejects anything that is not exactly
// one-hot per pixel.
inline Tensor normalize_mask(const Tensor& onehot) {
    require_rank(onehot, 3, "normalize_mask");
    const std::size_t c = onehot.shape[0], plane = onehot.shape[1] * onehot.shape[2];
    for (std::size_t p = 0; p < plane; ++p) {
        int ones = 0;
        for (std::size_t ci = 0; ci < c; ++ci) {
            float v = onehot[ci * plane + p];
            if (v == 1.0f)
                ++ones;
            else if (v != 0.0f)
                throw ValidationError("normalize_mask: entry is neither 0 nor 1");
        }
        if (ones != 1) throw ValidationError("normalize_mask: pixel is not one-hot");
    }
    Tensor out(onehot.shape);
    for (std::size_t i = 0; i < onehot.numel(); ++i) out[i] = 2.0f * onehot[i] - 1.0f;
    return out;
}

inline Tensor scale_mask(const Tensor& y0, double b) {
    if (!(b > 0.0)) throw ParameterError("scale_mask: b must be > 0");
    Tensor out(y0.shape);
    const float bf = static_cast<float>(b);
    for (std::size_t i = 0; i < y0.numel(); ++i) out[i] = bf * y0[i];
    return out;
}

// Pooled-ratio balancing factor over in-memory (image, normalized ±1 mask)
// pairs: sums of per-channel powers over the whole dataset, each normalized
// by total element count, then b = sqrt(ratio).
inline BalancingFactor compute_balancing_factor(
    std::span<const std::pair<Tensor, Tensor>> samples, std::string dataset_id,
    PowerRoute route = PowerRoute::spectral) {
    if (samples.empty()) throw ParameterError("compute_balancing_factor: empty dataset");
    double image_power = 0.0, mask_power = 0.0;
    std::size_t image_elems = 0, mask_elems = 0;
    for (const auto& [image, mask] : samples) {
        image_power += detail::stack_power(image, route);
        mask_power += detail::stack_power(mask, route);
        image_elems += image.numel();
        mask_elems += mask.numel();
    }
    BalancingFactor f;
    f.power_image = image_power / static_cast<double>(image_elems);
    f.power_mask = mask_power / static_cast<double>(mask_elems);
    f.dataset_id = std::move(dataset_id);
    f.num_samples = samples.size();
    if (f.power_image < 1e-12)
        throw ValidationError("compute_balancing_factor: degenerate image signal power");
    if (f.power_mask < 1e-12)
        throw ValidationError("compute_balancing_factor: degenerate mask signal power");
    f.b = std::sqrt(f.power_image / f.power_mask);
    if (f.b < 1e-6) throw ValidationError("compute_balancing_factor: b degenerates below 1e-6");
    return f;
}

// Manifest entry point: loads every one-hot sample, normalizes masks to ±1,
// pools powers across the whole dataset.
inline BalancingFactor compute_balancing_factor(const DatasetManifest& m,
                                                PowerRoute route = PowerRoute::spectral) {
    if (m.samples.empty()) throw ParameterError("compute_balancing_factor: empty dataset");
    std::vector<std::pair<Tensor, Tensor>> pairs;
    pairs.reserve(m.samples.size());
    for (const auto& rec : m.samples) {
        if (rec.kind != TargetKind::onehot)
            throw ValidationError("compute_balancing_factor: dataset must carry one-hot masks");
        Sample s = load_sample(m, rec);
        pairs.emplace_back(std::move(s.image), normalize_mask(s.target));
    }
    return compute_balancing_factor(std::span<const std::pair<Tensor, Tensor>>(pairs),
                                    m.id.empty() ? "unnamed" : m.id, route);
}

}  // namespace sardiff
