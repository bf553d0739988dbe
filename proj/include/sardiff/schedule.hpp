#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "sardiff/rng.hpp"
#include "sardiff/tensor.hpp"

namespace sardiff {

// Variance-preserving linear schedule. Index t runs 0..t_steps; entry 0 is
// the clean endpoint (alpha 1, sigma 0) so samplers can step down to t=0.
struct NoiseSchedule {
    int t_steps = 0;
    std::vector<double> beta;   // beta[0] unused
    std::vector<double> alpha;  // alpha[t] = sqrt(prod_{s<=t} (1 - beta_s))
    std::vector<double> sigma;  // sigma[t] = sqrt(1 - alpha[t]^2)

    bool valid_t(int t) const { return t >= 1 && t <= t_steps; }
};

inline NoiseSchedule make_linear(int t_steps, double beta_start = 1e-4, double beta_end = 0.02) {
    if (t_steps < 1) throw ParameterError("make_linear: t_steps must be >= 1");
    if (!(beta_start > 0.0) || beta_start > beta_end || !(beta_end < 1.0))
        throw ParameterError("make_linear: need 0 < beta_start <= beta_end < 1");
    NoiseSchedule s;
    s.t_steps = t_steps;
    s.beta.assign(t_steps + 1, 0.0);
    s.alpha.assign(t_steps + 1, 1.0);
    s.sigma.assign(t_steps + 1, 0.0);
    double alpha_sq = 1.0;
    for (int t = 1; t <= t_steps; ++t) {
        double frac = t_steps == 1 ? 0.0 : static_cast<double>(t - 1) / (t_steps - 1);
        s.beta[t] = beta_start + (beta_end - beta_start) * frac;
        alpha_sq *= 1.0 - s.beta[t];
        s.alpha[t] = std::sqrt(alpha_sq);
        s.sigma[t] = std::sqrt(1.0 - alpha_sq);
    }
    return s;
}

// Forward corruption at timestep t: x_t = alpha_t x + sigma_t eps for both
// modalities. y0_scaled is the mask already scaled by the balancing factor.
// Noise is drawn independently per modality (image first); tied_noise reuses
// the image draw on the mask branch for ablation.
inline std::pair<Tensor, Tensor> corrupt_pair(const Tensor& x0, const Tensor& y0_scaled, int t,
                                              const NoiseSchedule& sched, Rng& rng,
                                              bool tied_noise = false) {
    if (!sched.valid_t(t)) throw ParameterError("corrupt_pair: t out of range");
    const float a = static_cast<float>(sched.alpha[t]);
    const float s = static_cast<float>(sched.sigma[t]);
    Tensor eps_x = gaussian(rng, x0.shape);
    Tensor x_t(x0.shape);
    for (std::size_t i = 0; i < x0.numel(); ++i) x_t[i] = a * x0[i] + s * eps_x[i];
    Tensor y_t(y0_scaled.shape);
    if (tied_noise) {
        if (y0_scaled.numel() != x0.numel() && y0_scaled.shape.size() == 3) {
            // broadcast the single-channel image noise across mask channels
            const std::size_t plane = y0_scaled.shape[1] * y0_scaled.shape[2];
            for (std::size_t i = 0; i < y0_scaled.numel(); ++i)
                y_t[i] = a * y0_scaled[i] + s * eps_x[i % plane];
        } else {
            for (std::size_t i = 0; i < y0_scaled.numel(); ++i)
                y_t[i] = a * y0_scaled[i] + s * eps_x[i % eps_x.numel()];
        }
    } else {
        Tensor eps_y = gaussian(rng, y0_scaled.shape);
        for (std::size_t i = 0; i < y0_scaled.numel(); ++i)
            y_t[i] = a * y0_scaled[i] + s * eps_y[i];
    }
    return {std::move(x_t), std::move(y_t)};
}

// SNR at timestep t for a signal with the given per-element mean power;
// unit-variance noise has power 1.
inline double snr_at(int t, const NoiseSchedule& sched, double mean_power_signal) {
    if (t < 0 || t > sched.t_steps) throw ParameterError("snr_at: t out of range");
    if (sched.sigma[t] <= 0.0) throw ParameterError("snr_at: sigma is zero, SNR is infinite");
    double a = sched.alpha[t], s = sched.sigma[t];
    return a * a * mean_power_signal / (s * s);
}

}  // namespace sardiff
