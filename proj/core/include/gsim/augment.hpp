// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gsim/image.hpp"

namespace gsim {

// Counter-based generator (splitmix64) keyed by (seed, frame, mechanism) so
// every frame's random stream is reproducible out of order.
class CounterRng {
public:
    static CounterRng keyed(std::uint64_t seed, std::uint64_t frame, std::uint32_t mechanism);

    std::uint64_t next_u64();
    double uniform01();  // [0, 1)
    double uniform(double lo, double hi);
    std::uint64_t uniform_index(std::uint64_t count);  // [0, count)

private:
    std::uint64_t state_ = 0;
};

struct OverlayConfig {
    std::vector<std::string> paths;  // cycled by draw, one image per frame
    double weight_lo = 0.0;
    double weight_hi = 0.0;
};

struct HsvJitter {
    double hue_deg = 0.0;     // half-range, degrees
    double saturation = 0.0;  // half-range, fraction
    double value = 0.0;       // half-range, fraction
};

struct AugmentationConfig {
    std::optional<OverlayConfig> overlay;
    HsvJitter hsv;
    double gamma_lo = 1.0;
    double gamma_hi = 1.0;
    std::uint64_t seed = 0;
};

void validate_config(const AugmentationConfig& config);
AugmentationConfig load_augmentation_config(const std::string& path);

// Parameters actually applied to one frame; replaying them reproduces the
// output bit-exactly.
struct AppliedParams {
    std::string overlay_path;  // empty when no overlay
    double overlay_weight = 0.0;
    double hue_offset_deg = 0.0;
    double saturation_offset = 0.0;
    double value_offset = 0.0;
    double gamma = 1.0;
};

Image3 apply_gamma(const Image3& image, double gamma);
Image3 apply_overlay(const Image3& image, const Image3& overlay, double weight);

// RGB -> HSV -> RGB with uniform offsets drawn from the jitter half-ranges;
// hue wraps mod 360, saturation/value clamp to [0,1].
Image3 apply_hsv_jitter(const Image3& image, const HsvJitter& jitter, CounterRng& rng);

// Deterministic variant with explicit offsets (also the replay path).
Image3 apply_hsv_offsets(const Image3& image, double hue_offset_deg,
                         double saturation_offset, double value_offset);

// Pixel-space conversions used by the jitter (H in [0,360), S,V in [0,1]).
void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v);
void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b);

// Overlay -> HSV jitter -> gamma; the random stream is a pure function of
// (config.seed, frame_index). Disabled mechanisms leave the image bit-identical.
Image3 augment(const Image3& image, const AugmentationConfig& config,
               std::uint64_t frame_index, AppliedParams* applied = nullptr);

// Replays recorded parameters (no randomness).
Image3 apply_params(const Image3& image, const AppliedParams& params);

}  // namespace gsim
