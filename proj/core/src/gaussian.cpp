// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/gaussian.hpp"

#include <cmath>
#include <string>

#include "gsim/errors.hpp"

namespace gsim {

void validate_field(const GaussianField& field) {
    if (field.sh_degree < 0 || field.sh_degree > 3)
        throw validation_error("sh_degree " + std::to_string(field.sh_degree) +
                               " outside [0,3]");
    for (std::size_t i = 0; i < field.primitives.size(); ++i) {
        const auto& p = field.primitives[i];
        const std::string at = " at primitive " + std::to_string(i);
        if (!p.mean.finite()) throw validation_error("non-finite mean" + at);
        if (!p.scale.finite() || p.scale.x <= 0.0 || p.scale.y <= 0.0 || p.scale.z <= 0.0)
            throw validation_error("non-positive or non-finite scale" + at);
        if (!p.rotation.finite() || std::abs(p.rotation.norm() - 1.0) > 1e-6)
            throw validation_error("rotation not unit within 1e-6" + at);
        if (!std::isfinite(p.opacity) || p.opacity <= 0.0 || p.opacity >= 1.0)
            throw validation_error("opacity outside (0,1)" + at);
        for (double c : p.sh)
            if (!std::isfinite(c)) throw validation_error("non-finite SH coefficient" + at);
    }
}

void validate_nodes(const GaussianField& field, const std::vector<SceneNode>& nodes) {
    std::size_t background_count = 0;
    std::vector<char> covered(field.size(), 0);
    for (const auto& n : nodes) {
        if (n.range.begin > n.range.end || n.range.end > field.size())
            throw validation_error("node '" + n.id + "' range out of bounds");
        for (std::size_t i = n.range.begin; i < n.range.end; ++i) {
            if (covered[i])
                throw validation_error("node '" + n.id + "' overlaps another node range");
            covered[i] = 1;
        }
        if (n.kind == NodeKind::background) {
            ++background_count;
            const bool identity =
                std::abs(n.pose.rotation.w - 1.0) < 1e-12 &&
                std::abs(n.pose.rotation.x) < 1e-12 && std::abs(n.pose.rotation.y) < 1e-12 &&
                std::abs(n.pose.rotation.z) < 1e-12 && n.pose.translation.norm() < 1e-12;
            if (!identity)
                throw validation_error("background node '" + n.id + "' pose must be identity");
        } else {
            if (std::abs(n.pose.rotation.to_matrix().det() - 1.0) > 1e-6)
                throw validation_error("node '" + n.id + "' pose rotation is not proper rigid");
        }
    }
    if (background_count != 1)
        throw validation_error("scene must have exactly one background node, found " +
                               std::to_string(background_count));
    for (std::size_t i = 0; i < covered.size(); ++i)
        if (!covered[i])
            throw validation_error("primitive " + std::to_string(i) +
                                   " not covered by any node range");
}

void transform_primitives(GaussianField& field, const IndexRange& range,
                          const RigidTransform& transform) {
    if (range.begin > range.end || range.end > field.size())
        throw validation_error("transform_primitives: range [" +
                               std::to_string(range.begin) + "," + std::to_string(range.end) +
                               ") outside field of size " + std::to_string(field.size()));
    for (std::size_t i = range.begin; i < range.end; ++i) {
        auto& p = field.primitives[i];
        p.mean = transform.transform_point(p.mean);
        Quat q = transform.rotation * p.rotation;
        // Renormalize only on drift so an identity transform is a bit-exact no-op.
        if (std::abs(q.norm() - 1.0) > 1e-12) q = q.normalized();
        p.rotation = q;
    }
}

}  // namespace gsim
