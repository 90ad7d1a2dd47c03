// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsim/raster.hpp"

namespace gsim {

// Brute-force per-pixel renderer: sorts all splats once by the shared depth
// order and evaluates every splat at every pixel, with no tiling or binning.
// Kept deliberately independent of the tiled path so it can serve as its
// correctness reference; only the per-splat blending contract is shared.
RenderTarget reference_rasterize(const std::vector<ProjectedSplat>& splats,
                                 const CameraModel& camera,
                                 const RasterOptions& options = {});

}  // namespace gsim
