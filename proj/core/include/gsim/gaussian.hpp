// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gsim/math.hpp"

namespace gsim {

// Spherical-harmonic color block: 3 channels x 16 coefficients, channel-major,
// coefficient 0 of each channel is the DC term. Coefficients above the owning
// field's degree are zero.
using ShCoeffs = std::array<double, 48>;

inline constexpr int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }

// One anisotropic 3D Gaussian. Scales are linear meters (exponentiated from
// disk), opacity is post-sigmoid in (0,1), rotation is a unit quaternion.
struct GaussianPrimitive {
    Vec3 mean;
    Vec3 scale{1.0, 1.0, 1.0};
    Quat rotation;
    double opacity = 0.5;
    ShCoeffs sh{};

    double sh_at(int channel, int coeff) const { return sh[channel * 16 + coeff]; }
    void set_sh(int channel, int coeff, double v) { sh[channel * 16 + coeff] = v; }

    // World/node-frame covariance R diag(s^2) R^T.
    Mat3 covariance() const {
        const Mat3 r = rotation.to_matrix();
        const Mat3 s2 = Mat3::diag(scale.x * scale.x, scale.y * scale.y, scale.z * scale.z);
        return r * s2 * r.transposed();
    }
};

struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;  // exclusive

    std::size_t size() const { return end - begin; }
    bool contains(std::size_t i) const { return i >= begin && i < end; }
};

// Indexed primitive collection partitioned into scene-node ranges. A field
// loaded from a single asset has an empty node_ranges map.
struct GaussianField {
    std::vector<GaussianPrimitive> primitives;
    int sh_degree = 0;
    std::map<std::string, IndexRange> node_ranges;

    std::size_t size() const { return primitives.size(); }
    bool empty() const { return primitives.empty(); }
};

enum class NodeKind { background, interactive };

// Background or interactive entity driving a contiguous primitive range.
// Primitives are stored node-local; the pose places them in the world.
struct SceneNode {
    std::string id;
    NodeKind kind = NodeKind::background;
    RigidTransform pose;
    IndexRange range;
};

// Throws validation_error when a primitive violates its invariants
// (unit rotation within 1e-6, positive scales, opacity in (0,1), finite SH).
void validate_field(const GaussianField& field);

// Checks node ranges are disjoint and in-bounds; exactly one background node
// with identity pose; interactive poses proper rigid (det +1 within 1e-6).
void validate_nodes(const GaussianField& field, const std::vector<SceneNode>& nodes);

// Applies the rigid transform in place to primitives in [range.begin, range.end):
// means mapped, rotations left-multiplied, scales and SH untouched.
void transform_primitives(GaussianField& field, const IndexRange& range,
                          const RigidTransform& transform);

}  // namespace gsim
