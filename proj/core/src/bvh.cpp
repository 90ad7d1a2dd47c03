// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/bvh.hpp"

#include <algorithm>
#include <numeric>

namespace gsim {

namespace {

struct BuildContext {
    const std::vector<Aabb>& boxes;
    std::vector<Vec3> centroids;
    std::vector<std::uint32_t>& order;
    std::vector<BvhNode>& nodes;
};

Aabb range_bounds(const BuildContext& ctx, std::uint32_t first, std::uint32_t count) {
    Aabb box;
    for (std::uint32_t k = 0; k < count; ++k) box.expand(ctx.boxes[ctx.order[first + k]]);
    return box;
}

std::int32_t build_range(BuildContext& ctx, std::uint32_t first, std::uint32_t count) {
    const std::int32_t node_index = static_cast<std::int32_t>(ctx.nodes.size());
    ctx.nodes.push_back({});
    ctx.nodes[node_index].box = range_bounds(ctx, first, count);

    if (count <= Bvh::kLeafCapacity) {
        ctx.nodes[node_index].first = first;
        ctx.nodes[node_index].count = count;
        return node_index;
    }

    Aabb cbounds;
    for (std::uint32_t k = 0; k < count; ++k)
        cbounds.expand(ctx.centroids[ctx.order[first + k]]);
    const Vec3 cext = cbounds.extent();
    int axis = 0;
    if (cext.y > cext.x) axis = 1;
    if (cext.z > cext[axis]) axis = 2;
    const double extent = cext[axis];

    std::uint32_t mid = first + count / 2;  // fallback: median by current order
    if (extent > 1e-12) {
        struct Bin {
            Aabb box;
            std::uint32_t count = 0;
        };
        Bin bins[Bvh::kSahBins];
        const double lo = cbounds.lo[axis];
        const double scale = Bvh::kSahBins / extent;
        auto bin_of = [&](std::uint32_t prim) {
            const int b = static_cast<int>((ctx.centroids[prim][axis] - lo) * scale);
            return std::clamp(b, 0, Bvh::kSahBins - 1);
        };
        for (std::uint32_t k = 0; k < count; ++k) {
            const std::uint32_t prim = ctx.order[first + k];
            Bin& bin = bins[bin_of(prim)];
            bin.box.expand(ctx.boxes[prim]);
            ++bin.count;
        }

        // Sweep the 15 split planes, prefix from the left, suffix from the right.
        double left_area[Bvh::kSahBins];
        std::uint32_t left_count[Bvh::kSahBins];
        Aabb acc;
        std::uint32_t n = 0;
        for (int b = 0; b < Bvh::kSahBins - 1; ++b) {
            acc.expand(bins[b].box);
            n += bins[b].count;
            left_area[b] = acc.surface_area();
            left_count[b] = n;
        }
        acc = Aabb{};
        n = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        int best_split = -1;
        for (int b = Bvh::kSahBins - 1; b >= 1; --b) {
            acc.expand(bins[b].box);
            n += bins[b].count;
            const std::uint32_t nl = left_count[b - 1];
            if (nl == 0 || n == 0) continue;
            const double cost = left_area[b - 1] * nl + acc.surface_area() * n;
            if (cost < best_cost) {
                best_cost = cost;
                best_split = b;
            }
        }
        if (best_split >= 0) {
            auto* begin = ctx.order.data() + first;
            auto* split = std::stable_partition(begin, begin + count, [&](std::uint32_t prim) {
                return bin_of(prim) < best_split;
            });
            const std::uint32_t nl = static_cast<std::uint32_t>(split - begin);
            if (nl > 0 && nl < count) mid = first + nl;
        }
    }

    const std::int32_t left = build_range(ctx, first, mid - first);
    const std::int32_t right = build_range(ctx, mid, first + count - mid);
    ctx.nodes[node_index].left = left;
    ctx.nodes[node_index].right = right;
    return node_index;
}

}  // namespace

Bvh Bvh::build(const std::vector<Aabb>& boxes) {
    Bvh bvh;
    if (boxes.empty()) return bvh;
    bvh.prim_order_.resize(boxes.size());
    std::iota(bvh.prim_order_.begin(), bvh.prim_order_.end(), 0u);
    BuildContext ctx{boxes, {}, bvh.prim_order_, bvh.nodes_};
    ctx.centroids.reserve(boxes.size());
    for (const auto& b : boxes) ctx.centroids.push_back(b.center());
    bvh.nodes_.reserve(boxes.size() * 2);
    build_range(ctx, 0, static_cast<std::uint32_t>(boxes.size()));
    return bvh;
}

}  // namespace gsim
