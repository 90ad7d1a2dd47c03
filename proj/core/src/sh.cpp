// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/sh.hpp"

#include <algorithm>

namespace gsim {

Vec3 shade_sh(const ShCoeffs& sh, int degree, const Vec3& view_dir) {
    const double x = view_dir.x, y = view_dir.y, z = view_dir.z;

    double basis[16];
    int n = 1;
    basis[0] = kSh0;
    if (degree >= 1) {
        basis[1] = -kSh1 * y;
        basis[2] = kSh1 * z;
        basis[3] = -kSh1 * x;
        n = 4;
    }
    if (degree >= 2) {
        const double xx = x * x, yy = y * y, zz = z * z;
        basis[4] = kSh2[0] * x * y;
        basis[5] = kSh2[1] * y * z;
        basis[6] = kSh2[2] * (2.0 * zz - xx - yy);
        basis[7] = kSh2[3] * x * z;
        basis[8] = kSh2[4] * (xx - yy);
        n = 9;
    }
    if (degree >= 3) {
        const double xx = x * x, yy = y * y, zz = z * z;
        basis[9] = kSh3[0] * y * (3.0 * xx - yy);
        basis[10] = kSh3[1] * x * y * z;
        basis[11] = kSh3[2] * y * (4.0 * zz - xx - yy);
        basis[12] = kSh3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
        basis[13] = kSh3[4] * x * (4.0 * zz - xx - yy);
        basis[14] = kSh3[5] * z * (xx - yy);
        basis[15] = kSh3[6] * x * (xx - 3.0 * yy);
        n = 16;
    }

    Vec3 rgb;
    double* out[3] = {&rgb.x, &rgb.y, &rgb.z};
    for (int c = 0; c < 3; ++c) {
        double acc = 0.5;
        for (int k = 0; k < n; ++k) acc += basis[k] * sh[c * 16 + k];
        *out[c] = std::max(acc, 0.0);
    }
    return rgb;
}

}  // namespace gsim
