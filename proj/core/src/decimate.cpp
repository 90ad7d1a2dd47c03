// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "gsim/errors.hpp"
#include "gsim/transfer.hpp"

namespace gsim {

namespace {

// Symmetric 4x4 plane quadric, upper triangle.
struct Quadric {
    double q[10] = {};

    void add_plane(const Vec3& n, double d, double weight) {
        const double v[4] = {n.x, n.y, n.z, d};
        int k = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) q[k++] += weight * v[i] * v[j];
    }
    Quadric& operator+=(const Quadric& o) {
        for (int i = 0; i < 10; ++i) q[i] += o.q[i];
        return *this;
    }
    double cost(const Vec3& p) const {
        const double v[4] = {p.x, p.y, p.z, 1.0};
        // Expand v^T Q v with the upper triangle doubled off-diagonal.
        double acc = 0.0;
        int k = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j, ++k)
                acc += (i == j ? 1.0 : 2.0) * q[k] * v[i] * v[j];
        return acc;
    }
    // Solves grad = 0 for the optimal collapse position; false when singular.
    bool optimal(Vec3& out) const {
        const double a00 = q[0], a01 = q[1], a02 = q[2], b0 = q[3];
        const double a11 = q[4], a12 = q[5], b1 = q[6];
        const double a22 = q[7], b2 = q[8];
        const double det = a00 * (a11 * a22 - a12 * a12) - a01 * (a01 * a22 - a12 * a02) +
                           a02 * (a01 * a12 - a11 * a02);
        if (std::abs(det) < 1e-12) return false;
        const double inv = 1.0 / det;
        out.x = -inv * (b0 * (a11 * a22 - a12 * a12) - a01 * (b1 * a22 - a12 * b2) +
                        a02 * (b1 * a12 - a11 * b2));
        out.y = -inv * (a00 * (b1 * a22 - a12 * b2) - b0 * (a01 * a22 - a02 * a12) +
                        a02 * (a01 * b2 - b1 * a02));
        out.z = -inv * (a00 * (a11 * b2 - b1 * a12) - a01 * (a01 * b2 - b1 * a02) +
                        b0 * (a01 * a12 - a11 * a02));
        return out.finite();
    }
};

struct HeapEntry {
    double cost;
    std::uint32_t a, b;
    std::uint64_t version_a, version_b;
    Vec3 position;

    bool operator>(const HeapEntry& o) const { return cost > o.cost; }
};

struct Mesh {
    std::vector<Vec3> verts;
    std::vector<std::array<std::uint32_t, 3>> faces;
    std::vector<char> face_alive;
    std::vector<std::set<std::uint32_t>> vertex_faces;
    std::vector<Quadric> quadrics;
    std::vector<std::uint64_t> version;
    std::vector<char> boundary;
    std::size_t alive_faces = 0;

    std::set<std::uint32_t> neighbors(std::uint32_t v) const {
        std::set<std::uint32_t> out;
        for (std::uint32_t f : vertex_faces[v]) {
            for (int k = 0; k < 3; ++k)
                if (faces[f][k] != v) out.insert(faces[f][k]);
        }
        return out;
    }
};

bool collapse_flips_face(const Mesh& m, std::uint32_t f, std::uint32_t moving,
                         const Vec3& new_pos) {
    Vec3 p[3], q[3];
    for (int k = 0; k < 3; ++k) {
        p[k] = m.verts[m.faces[f][k]];
        q[k] = m.faces[f][k] == moving ? new_pos : p[k];
    }
    const Vec3 n0 = (p[1] - p[0]).cross(p[2] - p[0]);
    const Vec3 n1 = (q[1] - q[0]).cross(q[2] - q[0]);
    if (n1.norm_sq() < 1e-24) return true;  // collapses to a sliver
    return n0.dot(n1) <= 0.0;
}

void push_edges_of(const Mesh& m, std::uint32_t v,
                   std::priority_queue<HeapEntry, std::vector<HeapEntry>,
                                       std::greater<HeapEntry>>& heap) {
    for (std::uint32_t n : m.neighbors(v)) {
        const std::uint32_t a = std::min(v, n), b = std::max(v, n);
        Quadric q = m.quadrics[a];
        q += m.quadrics[b];
        Vec3 pos;
        if (!q.optimal(pos)) {
            const Vec3 mid = (m.verts[a] + m.verts[b]) * 0.5;
            const Vec3 candidates[3] = {m.verts[a], m.verts[b], mid};
            double best = std::numeric_limits<double>::infinity();
            for (const Vec3& c : candidates) {
                const double cost = q.cost(c);
                if (cost < best) {
                    best = cost;
                    pos = c;
                }
            }
        }
        heap.push({q.cost(pos), a, b, m.version[a], m.version[b], pos});
    }
}

}  // namespace

TriangleMesh decimate(const TriangleMesh& input, std::size_t target_faces) {
    if (target_faces < 4)
        throw validation_error("decimate: target below a tetrahedron (need >= 4 faces)");
    if (input.faces.size() <= target_faces) return input;

    Mesh m;
    m.verts = input.vertices;
    m.faces = input.faces;
    m.face_alive.assign(m.faces.size(), 1);
    m.alive_faces = m.faces.size();
    m.vertex_faces.resize(m.verts.size());
    m.quadrics.resize(m.verts.size());
    m.version.assign(m.verts.size(), 0);
    m.boundary.assign(m.verts.size(), 0);

    for (std::uint32_t f = 0; f < m.faces.size(); ++f)
        for (int k = 0; k < 3; ++k) m.vertex_faces[m.faces[f][k]].insert(f);

    // Area-weighted plane quadrics.
    for (std::uint32_t f = 0; f < m.faces.size(); ++f) {
        const Vec3& a = m.verts[m.faces[f][0]];
        const Vec3& b = m.verts[m.faces[f][1]];
        const Vec3& c = m.verts[m.faces[f][2]];
        const Vec3 cross = (b - a).cross(c - a);
        const double area = 0.5 * cross.norm();
        if (area <= kDegenerateFaceArea) continue;
        const Vec3 n = cross.normalized();
        const double d = -n.dot(a);
        for (int k = 0; k < 3; ++k) m.quadrics[m.faces[f][k]].add_plane(n, d, area);
    }

    // Boundary vertices: touched by any edge not shared by exactly two faces.
    {
        std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_faces;
        for (const auto& f : m.faces)
            for (int k = 0; k < 3; ++k) {
                const std::uint32_t u = f[k], v = f[(k + 1) % 3];
                ++edge_faces[{std::min(u, v), std::max(u, v)}];
            }
        for (const auto& [edge, count] : edge_faces)
            if (count != 2) {
                m.boundary[edge.first] = 1;
                m.boundary[edge.second] = 1;
            }
    }

    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<HeapEntry>> heap;
    for (std::uint32_t v = 0; v < m.verts.size(); ++v) push_edges_of(m, v, heap);

    while (m.alive_faces > target_faces && !heap.empty()) {
        const HeapEntry e = heap.top();
        heap.pop();
        const std::uint32_t a = e.a, b = e.b;
        if (e.version_a != m.version[a] || e.version_b != m.version[b]) continue;
        if (m.boundary[a] || m.boundary[b]) continue;
        if (m.vertex_faces[a].empty() || m.vertex_faces[b].empty()) continue;

        // Link condition: shared neighbors must be exactly the two faces' apexes.
        const auto na = m.neighbors(a);
        const auto nb = m.neighbors(b);
        if (!na.count(b)) continue;  // edge no longer exists
        std::size_t shared = 0;
        for (std::uint32_t v : na)
            if (nb.count(v)) ++shared;
        if (shared != 2) continue;

        // Faces sharing the edge disappear; others must not flip.
        std::vector<std::uint32_t> removed;
        bool ok = true;
        for (std::uint32_t f : m.vertex_faces[a]) {
            const auto& tri = m.faces[f];
            const bool has_b = tri[0] == b || tri[1] == b || tri[2] == b;
            if (has_b)
                removed.push_back(f);
            else if (collapse_flips_face(m, f, a, e.position))
                ok = false;
        }
        for (std::uint32_t f : m.vertex_faces[b]) {
            const auto& tri = m.faces[f];
            const bool has_a = tri[0] == a || tri[1] == a || tri[2] == a;
            if (!has_a && collapse_flips_face(m, f, b, e.position)) ok = false;
        }
        if (!ok || removed.size() != 2) continue;

        // Commit: move a, absorb b.
        m.verts[a] = e.position;
        m.quadrics[a] += m.quadrics[b];
        for (std::uint32_t f : removed) {
            if (!m.face_alive[f]) continue;
            m.face_alive[f] = 0;
            --m.alive_faces;
            for (int k = 0; k < 3; ++k) m.vertex_faces[m.faces[f][k]].erase(f);
        }
        for (std::uint32_t f : std::vector<std::uint32_t>(m.vertex_faces[b].begin(),
                                                          m.vertex_faces[b].end())) {
            for (int k = 0; k < 3; ++k)
                if (m.faces[f][k] == b) m.faces[f][k] = a;
            m.vertex_faces[b].erase(f);
            m.vertex_faces[a].insert(f);
        }
        ++m.version[a];
        ++m.version[b];
        push_edges_of(m, a, heap);
    }

    // Compact alive faces and referenced vertices.
    TriangleMesh out;
    std::vector<std::uint32_t> remap(m.verts.size(), UINT32_MAX);
    const bool has_colors = !input.colors.empty();
    for (std::uint32_t f = 0; f < m.faces.size(); ++f) {
        if (!m.face_alive[f]) continue;
        std::array<std::uint32_t, 3> tri{};
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t v = m.faces[f][k];
            if (remap[v] == UINT32_MAX) {
                remap[v] = static_cast<std::uint32_t>(out.vertices.size());
                out.vertices.push_back(m.verts[v]);
                if (has_colors) out.colors.push_back(input.colors[v]);
            }
            tri[k] = remap[v];
        }
        out.faces.push_back(tri);
    }
    return out;
}

}  // namespace gsim
