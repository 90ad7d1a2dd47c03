// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gsim/transfer.hpp"

namespace gsim {

namespace {

// Corner layout: bit0 x, then y, then z offsets per the classic cube.
constexpr int kCornerOffset[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                     {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

// Cube edges as (origin corner, target corner); the origin corner is the
// lattice origin of the edge, shared verbatim by the neighboring cell, so
// interpolation is bit-identical across cells.
constexpr int kEdgeCorner[12][2] = {{0, 1}, {1, 2}, {3, 2}, {0, 3}, {4, 5}, {5, 6},
                                    {7, 6}, {4, 7}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
// Edge axis (0 x, 1 y, 2 z) for the global weld key.
constexpr int kEdgeAxis[12] = {0, 1, 0, 1, 0, 1, 0, 1, 2, 2, 2, 2};

// Faces: 4 corners in cyclic order and the 4 edges between consecutive corners.
constexpr int kFaceCorner[6][4] = {{0, 1, 2, 3}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                   {1, 2, 6, 5},  {2, 3, 7, 6}, {3, 0, 4, 7}};
constexpr int kFaceEdge[6][4] = {{0, 1, 2, 3},  {4, 5, 6, 7},  {0, 9, 4, 8},
                                 {1, 10, 5, 9}, {2, 11, 6, 10}, {3, 8, 7, 11}};

struct CellExtractor {
    const TsdfVolume& volume;
    TriangleMesh& mesh;
    std::unordered_map<std::uint64_t, std::uint32_t>& edge_vertices;

    std::uint64_t edge_key(int cx, int cy, int cz, int edge) const {
        const int ox = cx + kCornerOffset[kEdgeCorner[edge][0]][0];
        const int oy = cy + kCornerOffset[kEdgeCorner[edge][0]][1];
        const int oz = cz + kCornerOffset[kEdgeCorner[edge][0]][2];
        const std::uint64_t linear =
            (static_cast<std::uint64_t>(oz) * volume.dims[1] + oy) * volume.dims[0] + ox;
        return linear * 3 + kEdgeAxis[edge];
    }

    void run(int cx, int cy, int cz) {
        double val[8];
        Vec3 pos[8];
        bool inside[8];
        int config = 0;
        for (int c = 0; c < 8; ++c) {
            const int vx = cx + kCornerOffset[c][0];
            const int vy = cy + kCornerOffset[c][1];
            const int vz = cz + kCornerOffset[c][2];
            const std::size_t idx = volume.index(vx, vy, vz);
            if (volume.weights[idx] <= 0.0) return;  // unobserved corner: skip cell
            val[c] = volume.tsdf[idx];
            pos[c] = volume.voxel_center(vx, vy, vz);
            inside[c] = val[c] < 0.0;
            if (inside[c]) config |= 1 << c;
        }
        if (config == 0 || config == 255) return;

        // Link every crossing edge to its partner on each adjacent face.
        int partner[12][2];
        int partner_count[12] = {};
        auto link = [&](int ea, int eb) {
            partner[ea][partner_count[ea]++] = eb;
            partner[eb][partner_count[eb]++] = ea;
        };
        for (int f = 0; f < 6; ++f) {
            int crossed[4];
            int n = 0;
            for (int k = 0; k < 4; ++k) {
                const int ca = kFaceCorner[f][k];
                const int cb = kFaceCorner[f][(k + 1) % 4];
                if (inside[ca] != inside[cb]) crossed[n++] = k;
            }
            if (n == 0) continue;
            if (n == 2) {
                link(kFaceEdge[f][crossed[0]], kFaceEdge[f][crossed[1]]);
                continue;
            }
            // Ambiguous face: all four edges cross. Resolve with the
            // asymptotic decider so both neighboring cells agree.
            const double f0 = val[kFaceCorner[f][0]];
            const double f1 = val[kFaceCorner[f][1]];
            const double f2 = val[kFaceCorner[f][2]];
            const double f3 = val[kFaceCorner[f][3]];
            const double denom = f0 + f2 - f1 - f3;
            const double saddle = denom != 0.0 ? (f0 * f2 - f1 * f3) / denom : 0.0;
            const bool diag02_inside = inside[kFaceCorner[f][0]];
            // Segments enclose the isolated corner pair.
            const bool inside_connected = saddle < 0.0;
            const bool enclose_13 = diag02_inside ? inside_connected : !inside_connected;
            if (enclose_13) {
                link(kFaceEdge[f][0], kFaceEdge[f][1]);
                link(kFaceEdge[f][2], kFaceEdge[f][3]);
            } else {
                link(kFaceEdge[f][3], kFaceEdge[f][0]);
                link(kFaceEdge[f][1], kFaceEdge[f][2]);
            }
        }

        // Crossing vertices, welded by global edge key.
        std::uint32_t vertex_of[12];
        for (int e = 0; e < 12; ++e) {
            if (partner_count[e] == 0) continue;
            const std::uint64_t key = edge_key(cx, cy, cz, e);
            auto [it, created] =
                edge_vertices.emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
            if (created) {
                const int a = kEdgeCorner[e][0];
                const int b = kEdgeCorner[e][1];
                double t = val[a] / (val[a] - val[b]);
                t = std::clamp(t, 0.0, 1.0);
                mesh.vertices.push_back(pos[a] + (pos[b] - pos[a]) * t);
            }
            vertex_of[e] = it->second;
        }

        // Walk closed loops through the crossings and fan-triangulate each.
        Vec3 in_centroid, out_centroid;
        int in_n = 0, out_n = 0;
        for (int c = 0; c < 8; ++c) {
            if (inside[c]) {
                in_centroid += pos[c];
                ++in_n;
            } else {
                out_centroid += pos[c];
                ++out_n;
            }
        }
        in_centroid = in_centroid / in_n;
        out_centroid = out_centroid / out_n;
        const Vec3 outward = out_centroid - in_centroid;

        bool visited[12] = {};
        for (int start = 0; start < 12; ++start) {
            if (partner_count[start] == 0 || visited[start]) continue;
            int loop[12];
            int len = 0;
            int prev = -1;
            int cur = start;
            do {
                visited[cur] = true;
                loop[len++] = cur;
                const int next = partner[cur][0] == prev ? partner[cur][1] : partner[cur][0];
                prev = cur;
                cur = next;
            } while (cur != start && len < 12);
            if (len < 3) continue;

            Vec3 normal;  // Newell
            for (int k = 0; k < len; ++k) {
                const Vec3& p0 = mesh.vertices[vertex_of[loop[k]]];
                const Vec3& p1 = mesh.vertices[vertex_of[loop[(k + 1) % len]]];
                normal += p0.cross(p1);
            }
            const bool flip = normal.dot(outward) < 0.0;
            for (int k = 1; k + 1 < len; ++k) {
                std::array<std::uint32_t, 3> tri{vertex_of[loop[0]], vertex_of[loop[k]],
                                                 vertex_of[loop[k + 1]]};
                if (flip) std::swap(tri[1], tri[2]);
                mesh.faces.push_back(tri);
            }
        }
    }
};

}  // namespace

TriangleMesh extract_mesh(const TsdfVolume& volume) {
    TriangleMesh mesh;
    std::unordered_map<std::uint64_t, std::uint32_t> edge_vertices;
    CellExtractor extractor{volume, mesh, edge_vertices};
    for (int z = 0; z + 1 < volume.dims[2]; ++z)
        for (int y = 0; y + 1 < volume.dims[1]; ++y)
            for (int x = 0; x + 1 < volume.dims[0]; ++x) extractor.run(x, y, z);
    return mesh;
}

}  // namespace gsim
