// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "gsim/gaussian.hpp"

namespace gsim {

// Splat PLY: binary little-endian, per-vertex float32 properties in order
//   x y z nx ny nz f_dc_0..2 f_rest_0..(3*((d+1)^2-1)-1) opacity scale_0..2 rot_0..3
// Scales are stored as natural logs, opacities pre-sigmoid, quaternions
// unnormalized in (w,x,y,z) order. Loading applies exp/sigmoid/normalization.
//
// Throws format_error naming the missing/unexpected property on a malformed
// header, validation_error (with primitive index) on non-finite payload values,
// io_error on unreadable files.
GaussianField load_splat_ply(const std::string& path);

// Inverse transforms applied on write (log scale, logit opacity). save->load
// reproduces the field exactly; save->load->save is byte-identical.
void save_splat_ply(const GaussianField& field, const std::string& path);

}  // namespace gsim
