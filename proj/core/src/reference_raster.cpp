// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/reference_raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gsim {

RenderTarget reference_rasterize(const std::vector<ProjectedSplat>& splats,
                                 const CameraModel& camera, const RasterOptions& options) {
    const int width = camera.width;
    const int height = camera.height;
    RenderTarget target(width, height);

    std::vector<std::uint32_t> order(splats.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return depth_sort_key(splats[a].view_depth) < depth_sort_key(splats[b].view_depth);
    });

    // Cheap exact skip: alpha_peak*exp(-q/2) < kAlphaSkip iff q > q_cut.
    std::vector<double> q_cut(splats.size());
    for (std::size_t s = 0; s < splats.size(); ++s)
        q_cut[s] = 2.0 * std::log(std::max(splats[s].alpha_peak, 1e-300) / kAlphaSkip);

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double px = x + 0.5;
            const double py = y + 0.5;
            double cr = 0.0, cg = 0.0, cb = 0.0, d = 0.0, acc = 0.0;
            double transmittance = 1.0;
            for (const std::uint32_t s : order) {
                const ProjectedSplat& sp = splats[s];
                const double dx = sp.pixel_center.x - px;
                const double dy = sp.pixel_center.y - py;
                if (std::abs(dx) > sp.radius || std::abs(dy) > sp.radius) continue;
                const double q =
                    sp.inv_xx * dx * dx + 2.0 * sp.inv_xy * dx * dy + sp.inv_yy * dy * dy;
                // Margin keeps boundary cases on the exact alpha comparison below.
                if (q > q_cut[s] + 1e-9) continue;
                const double alpha = std::min(sp.alpha_peak * std::exp(-0.5 * q), kAlphaClamp);
                if (alpha < kAlphaSkip) continue;
                const double w = alpha * transmittance;
                cr += sp.rgb.x * w;
                cg += sp.rgb.y * w;
                cb += sp.rgb.z * w;
                d += sp.view_depth * w;
                acc += w;
                transmittance *= 1.0 - alpha;
                if (transmittance < options.transmittance_cutoff) break;
            }
            float* rgb = target.rgb.px(x, y);
            rgb[0] = static_cast<float>(std::clamp(cr, 0.0, 1.0));
            rgb[1] = static_cast<float>(std::clamp(cg, 0.0, 1.0));
            rgb[2] = static_cast<float>(std::clamp(cb, 0.0, 1.0));
            if (options.normalize_depth)
                target.depth.at(x, y) = acc > 1e-12 ? static_cast<float>(d / acc) : 0.0f;
            else
                target.depth.at(x, y) = static_cast<float>(d);
            target.accum_alpha.at(x, y) = static_cast<float>(acc);
        }
    }
    return target;
}

}  // namespace gsim
