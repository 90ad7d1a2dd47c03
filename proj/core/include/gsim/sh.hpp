// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gsim/gaussian.hpp"
#include "gsim/math.hpp"

namespace gsim {

// Real spherical-harmonic basis constants, bands 0..3.
inline constexpr double kSh0 = 0.28209479177387814;
inline constexpr double kSh1 = 0.4886025119029199;
inline constexpr double kSh2[5] = {1.0925484305920792, -1.0925484305920792,
                                   0.31539156525252005, -1.0925484305920792,
                                   0.5462742152960396};
inline constexpr double kSh3[7] = {-0.5900435899266435, 2.890611442640554,
                                   -0.4570457994644658, 0.3731763325901154,
                                   -0.4570457994644658, 1.445305721320277,
                                   -0.5900435899266435};

// Evaluates view-dependent color: 0.5 + sum_k basis_k(view_dir) * coeff_k per
// channel, clamped to >= 0. view_dir must be unit length.
Vec3 shade_sh(const ShCoeffs& sh, int degree, const Vec3& view_dir);

}  // namespace gsim
