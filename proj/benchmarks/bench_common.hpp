// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>

#include "gsim/gaussian.hpp"

namespace bench {

inline gsim::GaussianField random_field(std::uint64_t seed, std::size_t count,
                                        double extent, double scale_lo, double scale_hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-extent / 2, extent / 2);
    std::uniform_real_distribution<double> scale(scale_lo, scale_hi);
    std::uniform_real_distribution<double> opacity(0.3, 0.95);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    gsim::GaussianField field;
    field.sh_degree = 1;
    field.primitives.resize(count);
    for (auto& p : field.primitives) {
        p.mean = {pos(rng), pos(rng), pos(rng)};
        p.scale = {scale(rng), scale(rng), scale(rng)};
        gsim::Quat q{unit(rng), unit(rng), unit(rng), unit(rng)};
        while (q.norm() < 1e-3) q = {unit(rng), unit(rng), unit(rng), unit(rng)};
        p.rotation = q.normalized();
        p.opacity = opacity(rng);
        for (int c = 0; c < 3; ++c)
            for (int k = 0; k < 4; ++k) p.set_sh(c, k, 0.3 * unit(rng));
    }
    return field;
}

}  // namespace bench
