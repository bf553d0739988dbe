#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "sardiff/tensor.hpp"

namespace sardiff {

// pcg32 (O'Neill, XSH-RR output function): 64-bit state, odd 64-bit stream
// increment. One fixed generator for the whole project so every seeded run
// replays bit-exactly; normals come from it via Box-Muller. Run manifests
// record the algorithm name RNG_ALGORITHM.
inline constexpr const char* RNG_ALGORITHM = "pcg32-xsh-rr+box-muller";

class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        state_ = 0u;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Uniform in (0, 1): offset by half an ulp of 2^-32 so log() is safe.
    double next_open01() { return (static_cast<double>(next_u32()) + 0.5) * 0x1p-32; }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u32()) * 0x1p-32; }
    float next_float() { return static_cast<float>(next_u32() >> 8) * 0x1p-24f; }

    // Uniform integer in [0, bound). Fixed-point multiply keeps it branch-free
    // and reproducible; the O(bound/2^32) bias is irrelevant at desk scale.
    std::uint32_t next_below(std::uint32_t bound) {
        return static_cast<std::uint32_t>((static_cast<std::uint64_t>(next_u32()) * bound) >> 32);
    }

    // Standard normal via Box-Muller. Pairs are consumed in order; the spare
    // carries over to the next call on the same generator.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = next_open01();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 1;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// i.i.d. standard normal tensor, deterministic given the generator state.
inline Tensor gaussian(Rng& rng, std::vector<std::size_t> shape) {
    Tensor out(std::move(shape));
    for (auto& v : out.data) v = static_cast<float>(rng.normal());
    return out;
}

}  // namespace sardiff
