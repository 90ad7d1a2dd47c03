// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "gsim/camera.hpp"
#include "gsim/gaussian.hpp"
#include "gsim/image.hpp"

namespace gsim {

// 2D footprint of a projected Gaussian. cov_* is the 2x2 screen-space
// covariance after the low-pass floor; inv_* its inverse; radius the 3-sigma
// extent from the major eigenvalue used for binning and the per-pixel
// footprint test.
struct ProjectedSplat {
    Vec2 pixel_center;
    double cov_xx = 0.0, cov_xy = 0.0, cov_yy = 0.0;
    double inv_xx = 0.0, inv_xy = 0.0, inv_yy = 0.0;
    double view_depth = 0.0;  // meters, in (near, far)
    double alpha_peak = 0.0;
    Vec3 rgb;  // SH-shaded, >= 0, unclamped above
    double radius = 0.0;  // pixels
    std::uint32_t prim_index = 0;
};

struct RasterOptions {
    // Divide composited depth by accumulated alpha (pixels with alpha ~ 0 stay 0).
    bool normalize_depth = false;
    // Front-to-back blending stops once transmittance drops below this.
    double transmittance_cutoff = 1e-4;
};

inline constexpr int kTileSize = 16;
inline constexpr double kCovarianceFloor = 0.3;   // pixel^2, added to cov2d diagonal
inline constexpr double kAlphaClamp = 0.99;
inline constexpr double kAlphaSkip = 1.0 / 255.0;

// Depth ordering shared by the tiled rasterizer and the brute-force reference:
// ascending float32-quantized view depth, ties broken by primitive index.
inline std::uint32_t depth_sort_key(double view_depth) {
    return std::bit_cast<std::uint32_t>(static_cast<float>(view_depth));
}

// Projects node-posed primitives into camera space: culls behind-near/far and
// fully off-screen footprints, builds world covariance R diag(s^2) R^T with the
// node rotation composed, maps it through the local-affine perspective
// Jacobian, floors the 2D covariance, and shades SH with the view direction
// mapped into the node-local frame.
std::vector<ProjectedSplat> project(const GaussianField& field,
                                    const std::vector<SceneNode>& nodes,
                                    const CameraModel& camera);

// Tile-binned front-to-back alpha compositing of color and z-position.
RenderTarget rasterize(const std::vector<ProjectedSplat>& splats, const CameraModel& camera,
                       const RasterOptions& options = {});

// One target per camera; cameras render independently and the result does not
// depend on evaluation order or thread count.
std::vector<RenderTarget> render(const GaussianField& field,
                                 const std::vector<SceneNode>& nodes,
                                 const std::vector<CameraModel>& cameras,
                                 const RasterOptions& options = {});

}  // namespace gsim
