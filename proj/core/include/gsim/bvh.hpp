// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "gsim/math.hpp"

namespace gsim {

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit length
    double t_max = std::numeric_limits<double>::infinity();
};

// Slab test over [0, t_max]; NaN-safe for axis-parallel rays.
inline bool ray_aabb_hit(const Aabb& box, const Vec3& origin, const Vec3& inv_dir,
                         double t_max) {
    double t0 = 0.0, t1 = t_max;
    const double tx0 = (box.lo.x - origin.x) * inv_dir.x;
    const double tx1 = (box.hi.x - origin.x) * inv_dir.x;
    t0 = std::fmax(t0, std::fmin(tx0, tx1));
    t1 = std::fmin(t1, std::fmax(tx0, tx1));
    const double ty0 = (box.lo.y - origin.y) * inv_dir.y;
    const double ty1 = (box.hi.y - origin.y) * inv_dir.y;
    t0 = std::fmax(t0, std::fmin(ty0, ty1));
    t1 = std::fmin(t1, std::fmax(ty0, ty1));
    const double tz0 = (box.lo.z - origin.z) * inv_dir.z;
    const double tz1 = (box.hi.z - origin.z) * inv_dir.z;
    t0 = std::fmax(t0, std::fmin(tz0, tz1));
    t1 = std::fmin(t1, std::fmax(tz0, tz1));
    return t0 <= t1;
}

struct BvhNode {
    Aabb box;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t first = 0;  // into prim_order, leaf only
    std::uint32_t count = 0;  // > 0 marks a leaf

    bool is_leaf() const { return count > 0; }
};

// Binary SAH-binned BVH over primitive AABBs. Leaves hold at most
// kLeafCapacity indices; every primitive appears in exactly one leaf.
class Bvh {
public:
    static constexpr std::uint32_t kLeafCapacity = 4;
    static constexpr int kSahBins = 16;

    static Bvh build(const std::vector<Aabb>& boxes);

    bool empty() const { return nodes_.empty(); }
    const std::vector<BvhNode>& nodes() const { return nodes_; }
    const std::vector<std::uint32_t>& prim_order() const { return prim_order_; }
    const Aabb& root_bounds() const { return nodes_.front().box; }

    // Calls visit(prim_index) for every primitive in a leaf whose node chain
    // the ray enters; the caller re-tests the primitive's own box.
    template <typename Visit>
    void for_each_candidate(const Ray& ray, Visit&& visit) const {
        if (nodes_.empty()) return;
        const Vec3 inv{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
        static thread_local std::vector<std::int32_t> stack;
        stack.clear();
        stack.push_back(0);
        while (!stack.empty()) {
            const BvhNode& node = nodes_[stack.back()];
            stack.pop_back();
            if (!ray_aabb_hit(node.box, ray.origin, inv, ray.t_max)) continue;
            if (node.is_leaf()) {
                for (std::uint32_t k = 0; k < node.count; ++k)
                    visit(prim_order_[node.first + k]);
            } else {
                stack.push_back(node.left);
                stack.push_back(node.right);
            }
        }
    }

private:
    std::vector<BvhNode> nodes_;
    std::vector<std::uint32_t> prim_order_;
};

}  // namespace gsim
