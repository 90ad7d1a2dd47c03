// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gsim/math.hpp"

namespace gsim {

// Indexed triangle set, the physics-side twin of a Gaussian field.
// colors, when present, is per-vertex RGB in [0,1].
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;
    std::vector<Vec3> colors;  // empty or same length as vertices

    bool has_colors() const { return !colors.empty(); }

    Vec3 face_normal(std::size_t f) const {
        const auto& t = faces[f];
        const Vec3 e1 = vertices[t[1]] - vertices[t[0]];
        const Vec3 e2 = vertices[t[2]] - vertices[t[0]];
        return e1.cross(e2).normalized();
    }
    double face_area(std::size_t f) const {
        const auto& t = faces[f];
        const Vec3 e1 = vertices[t[1]] - vertices[t[0]];
        const Vec3 e2 = vertices[t[2]] - vertices[t[0]];
        return 0.5 * e1.cross(e2).norm();
    }
    Vec3 face_barycenter(std::size_t f) const {
        const auto& t = faces[f];
        return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
    }

    Aabb bounds() const {
        Aabb box;
        for (const auto& v : vertices) box.expand(v);
        return box;
    }
};

inline constexpr double kDegenerateFaceArea = 1e-12;  // m^2

// Drops faces with area <= kDegenerateFaceArea and returns how many were removed.
std::size_t drop_degenerate_faces(TriangleMesh& mesh);

// Throws validation_error on out-of-range face indices or non-finite vertices.
void validate_mesh(const TriangleMesh& mesh);

}  // namespace gsim
