// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/augment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gsim/errors.hpp"
#include "gsim/image_io.hpp"

namespace gsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint32_t kMechanismOverlay = 1;
constexpr std::uint32_t kMechanismHsv = 2;
constexpr std::uint32_t kMechanismGamma = 3;

}  // namespace

CounterRng CounterRng::keyed(std::uint64_t seed, std::uint64_t frame,
                             std::uint32_t mechanism) {
    CounterRng rng;
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = a + frame;
    a = splitmix64(s);
    s = a + mechanism;
    rng.state_ = splitmix64(s);
    return rng;
}

std::uint64_t CounterRng::next_u64() { return splitmix64(state_); }

double CounterRng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::uint64_t CounterRng::uniform_index(std::uint64_t count) {
    return count > 0 ? next_u64() % count : 0;
}

void validate_config(const AugmentationConfig& config) {
    if (config.overlay) {
        const auto& o = *config.overlay;
        if (o.paths.empty()) throw validation_error("augment: overlay has no image paths");
        if (!(o.weight_lo >= 0.0) || !(o.weight_hi <= 1.0) || o.weight_lo > o.weight_hi)
            throw validation_error("augment: overlay weight range must be ordered in [0,1]");
    }
    if (config.hsv.hue_deg < 0.0 || config.hsv.saturation < 0.0 || config.hsv.value < 0.0)
        throw validation_error("augment: HSV half-ranges must be non-negative");
    if (!(config.gamma_lo > 0.0) || config.gamma_lo > config.gamma_hi)
        throw validation_error("augment: need 0 < gamma_lo <= gamma_hi");
}

AugmentationConfig load_augmentation_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open augmentation config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw format_error("'" + path + "': " + e.what());
    }
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    AugmentationConfig config;
    try {
        if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("overlay") && !j.at("overlay").is_null()) {
            OverlayConfig o;
            o.paths = j.at("overlay").at("paths").get<std::vector<std::string>>();
            for (auto& p : o.paths) {
                const std::filesystem::path rel(p);
                if (!rel.is_absolute()) p = (base / rel).string();
            }
            const auto w = j.at("overlay").at("weight").get<std::vector<double>>();
            if (w.size() != 2)
                throw format_error("'" + path + "': overlay weight must be [lo, hi]");
            o.weight_lo = w[0];
            o.weight_hi = w[1];
            config.overlay = std::move(o);
        }
        if (j.contains("hsv") && !j.at("hsv").is_null()) {
            const auto& h = j.at("hsv");
            config.hsv.hue_deg = h.value("hue_deg", 0.0);
            config.hsv.saturation = h.value("sat", 0.0);
            config.hsv.value = h.value("val", 0.0);
        }
        if (j.contains("gamma") && !j.at("gamma").is_null()) {
            const auto g = j.at("gamma").get<std::vector<double>>();
            if (g.size() != 2) throw format_error("'" + path + "': gamma must be [lo, hi]");
            config.gamma_lo = g[0];
            config.gamma_hi = g[1];
        }
    } catch (const nlohmann::json::exception& e) {
        throw format_error("'" + path + "': " + e.what());
    }
    validate_config(config);
    return config;
}

Image3 apply_gamma(const Image3& image, double gamma) {
    if (!(gamma > 0.0)) throw validation_error("apply_gamma: gamma must be positive");
    Image3 out = image;
    if (gamma == 1.0) return out;
    for (float& v : out.data)
        v = static_cast<float>(std::pow(std::clamp(static_cast<double>(v), 0.0, 1.0), gamma));
    return out;
}

Image3 apply_overlay(const Image3& image, const Image3& overlay, double weight) {
    if (weight < 0.0 || weight > 1.0)
        throw validation_error("apply_overlay: weight outside [0,1]");
    Image3 out = image;
    if (weight == 0.0) return out;
    for (int y = 0; y < out.height; ++y) {
        // Nearest-neighbor resample of the overlay onto the image grid.
        const int oy = std::min(static_cast<int>(static_cast<std::int64_t>(y) *
                                                 overlay.height / out.height),
                                overlay.height - 1);
        for (int x = 0; x < out.width; ++x) {
            const int ox = std::min(static_cast<int>(static_cast<std::int64_t>(x) *
                                                     overlay.width / out.width),
                                    overlay.width - 1);
            const float* src = overlay.px(ox, oy);
            float* dst = out.px(x, y);
            for (int c = 0; c < 3; ++c)
                dst[c] = static_cast<float>((1.0 - weight) * dst[c] + weight * src[c]);
        }
    }
    return out;
}

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
    const double cmax = std::max({r, g, b});
    const double cmin = std::min({r, g, b});
    const double delta = cmax - cmin;
    v = cmax;
    s = cmax > 0.0 ? delta / cmax : 0.0;
    if (delta <= 0.0) {
        h = 0.0;
        return;
    }
    if (cmax == r)
        h = 60.0 * std::fmod((g - b) / delta + 6.0, 6.0);
    else if (cmax == g)
        h = 60.0 * ((b - r) / delta + 2.0);
    else
        h = 60.0 * ((r - g) / delta + 4.0);
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
    h = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0);
    const int sector = static_cast<int>(h / 60.0) % 6;
    const double f = h / 60.0 - std::floor(h / 60.0);
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (sector) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
}

Image3 apply_hsv_offsets(const Image3& image, double hue_offset_deg, double sat_offset,
                         double val_offset) {
    if (hue_offset_deg == 0.0 && sat_offset == 0.0 && val_offset == 0.0) return image;
    Image3 out = image;
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        float* px = out.data.data() + i * 3;
        double h, s, v;
        rgb_to_hsv(std::clamp(static_cast<double>(px[0]), 0.0, 1.0),
                   std::clamp(static_cast<double>(px[1]), 0.0, 1.0),
                   std::clamp(static_cast<double>(px[2]), 0.0, 1.0), h, s, v);
        h += hue_offset_deg;
        s = std::clamp(s + sat_offset, 0.0, 1.0);
        v = std::clamp(v + val_offset, 0.0, 1.0);
        double r, g, b;
        hsv_to_rgb(h, s, v, r, g, b);
        px[0] = static_cast<float>(r);
        px[1] = static_cast<float>(g);
        px[2] = static_cast<float>(b);
    }
    return out;
}

Image3 apply_hsv_jitter(const Image3& image, const HsvJitter& jitter, CounterRng& rng) {
    const double hue = rng.uniform(-jitter.hue_deg, jitter.hue_deg);
    const double sat = rng.uniform(-jitter.saturation, jitter.saturation);
    const double val = rng.uniform(-jitter.value, jitter.value);
    if (jitter.hue_deg == 0.0 && jitter.saturation == 0.0 && jitter.value == 0.0)
        return image;
    return apply_hsv_offsets(image, hue, sat, val);
}

Image3 augment(const Image3& image, const AugmentationConfig& config,
               std::uint64_t frame_index, AppliedParams* applied) {
    validate_config(config);
    AppliedParams params;

    if (config.overlay) {
        CounterRng rng = CounterRng::keyed(config.seed, frame_index, kMechanismOverlay);
        const auto idx = rng.uniform_index(config.overlay->paths.size());
        params.overlay_path = config.overlay->paths[idx];
        params.overlay_weight =
            rng.uniform(config.overlay->weight_lo, config.overlay->weight_hi);
    }
    {
        CounterRng rng = CounterRng::keyed(config.seed, frame_index, kMechanismHsv);
        params.hue_offset_deg = rng.uniform(-config.hsv.hue_deg, config.hsv.hue_deg);
        params.saturation_offset =
            rng.uniform(-config.hsv.saturation, config.hsv.saturation);
        params.value_offset = rng.uniform(-config.hsv.value, config.hsv.value);
        if (config.hsv.hue_deg == 0.0 && config.hsv.saturation == 0.0 &&
            config.hsv.value == 0.0) {
            params.hue_offset_deg = 0.0;
            params.saturation_offset = 0.0;
            params.value_offset = 0.0;
        }
    }
    {
        CounterRng rng = CounterRng::keyed(config.seed, frame_index, kMechanismGamma);
        params.gamma = rng.uniform(config.gamma_lo, config.gamma_hi);
        if (config.gamma_lo == 1.0 && config.gamma_hi == 1.0) params.gamma = 1.0;
    }

    if (applied) *applied = params;
    return apply_params(image, params);
}

Image3 apply_params(const Image3& image, const AppliedParams& params) {
    Image3 out = image;
    if (!params.overlay_path.empty()) {
        const Image3 overlay = read_png_rgb(params.overlay_path);
        out = apply_overlay(out, overlay, params.overlay_weight);
    }
    out = apply_hsv_offsets(out, params.hue_offset_deg, params.saturation_offset,
                            params.value_offset);
    if (params.gamma != 1.0) out = apply_gamma(out, params.gamma);
    return out;
}

}  // namespace gsim
