// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "test_oracles.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace oracle {

using gsim::Aabb;
using gsim::CameraModel;
using gsim::GaussianField;
using gsim::GaussianPrimitive;
using gsim::Image1;
using gsim::Quat;
using gsim::TriangleMesh;
using gsim::Vec3;

namespace fs = std::filesystem;

// ---- test assets -----------------------------------------------------------

namespace {

std::uint64_t weld_key(const Vec3& v) {
    const auto q = [](double x) {
        return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::llround(x * 1e9)) +
                                          (1ll << 40));
    };
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint64_t part : {q(v.x), q(v.y), q(v.z)}) {
        h ^= part;
        h *= 1099511628211ull;
    }
    return h;
}

struct Welder {
    TriangleMesh mesh;
    std::map<std::uint64_t, std::uint32_t> seen;

    std::uint32_t add(const Vec3& v) {
        const std::uint64_t key = weld_key(v);
        auto [it, inserted] = seen.emplace(key, mesh.vertices.size());
        if (inserted) mesh.vertices.push_back(v);
        return it->second;
    }
    void face(const Vec3& a, const Vec3& b, const Vec3& c) {
        mesh.faces.push_back({add(a), add(b), add(c)});
    }
};

}  // namespace

TriangleMesh icosphere(double radius, int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {{-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0},
                               {0, -1, t}, {0, 1, t},   {0, -1, -t}, {0, 1, -t},
                               {t, 0, -1}, {t, 0, 1},   {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : verts) v = v.normalized() * radius;
    std::vector<std::array<std::uint32_t, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::uint64_t, std::uint32_t> midpoint;
        auto mid = [&](std::uint32_t a, std::uint32_t b) {
            const std::uint64_t key =
                (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
            auto [it, inserted] = midpoint.emplace(key, verts.size());
            if (inserted) verts.push_back(((verts[a] + verts[b]) * 0.5).normalized() * radius);
            return it->second;
        };
        std::vector<std::array<std::uint32_t, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const std::uint32_t ab = mid(f[0], f[1]);
            const std::uint32_t bc = mid(f[1], f[2]);
            const std::uint32_t ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    TriangleMesh mesh;
    mesh.vertices = std::move(verts);
    mesh.faces = std::move(faces);
    return mesh;
}

TriangleMesh subdivided_cube(double edge, int n) {
    Welder welder;
    const double h = edge / 2.0;
    // axis u, axis v, fixed axis value, normal sign
    struct Face {
        int ua, va, fa;
        double fv;
        bool flip;
    };
    const Face faces[6] = {{0, 1, 2, +h, false}, {0, 1, 2, -h, true},
                           {1, 2, 0, +h, false}, {1, 2, 0, -h, true},
                           {2, 0, 1, +h, false}, {2, 0, 1, -h, true}};
    auto at = [&](const Face& f, double u, double v) {
        double c[3];
        c[f.ua] = u;
        c[f.va] = v;
        c[f.fa] = f.fv;
        return Vec3{c[0], c[1], c[2]};
    };
    for (const auto& f : faces) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double u0 = -h + edge * i / n, u1 = -h + edge * (i + 1) / n;
                const double v0 = -h + edge * j / n, v1 = -h + edge * (j + 1) / n;
                const Vec3 p00 = at(f, u0, v0), p10 = at(f, u1, v0);
                const Vec3 p11 = at(f, u1, v1), p01 = at(f, u0, v1);
                if (!f.flip) {
                    welder.face(p00, p10, p11);
                    welder.face(p00, p11, p01);
                } else {
                    welder.face(p00, p11, p10);
                    welder.face(p00, p01, p11);
                }
            }
        }
    }
    return std::move(welder.mesh);
}

GaussianField random_field(std::uint64_t seed, std::size_t count, double box_extent,
                           double scale_lo, double scale_hi, int sh_degree) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-box_extent / 2, box_extent / 2);
    std::uniform_real_distribution<double> scale(scale_lo, scale_hi);
    std::uniform_real_distribution<double> opacity(0.2, 0.95);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> coeff(-0.6, 0.6);

    GaussianField field;
    field.sh_degree = sh_degree;
    const int coeffs = gsim::sh_coeff_count(sh_degree);
    field.primitives.resize(count);
    for (auto& p : field.primitives) {
        p.mean = {pos(rng), pos(rng), pos(rng)};
        p.scale = {scale(rng), scale(rng), scale(rng)};
        Quat q{unit(rng), unit(rng), unit(rng), unit(rng)};
        while (q.norm() < 1e-3) q = {unit(rng), unit(rng), unit(rng), unit(rng)};
        p.rotation = q.normalized();
        p.opacity = opacity(rng);
        for (int c = 0; c < 3; ++c)
            for (int k = 0; k < coeffs; ++k) p.set_sh(c, k, coeff(rng));
    }
    return field;
}

GaussianField sphere_shell_field(double radius, int count, double tangent_scale,
                                 double opacity) {
    GaussianField field;
    field.sh_degree = 0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    field.primitives.resize(count);
    // Fibonacci sphere for even coverage.
    const double golden = gsim::kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        const Vec3 normal{r * std::cos(phi), r * std::sin(phi), z};
        auto& p = field.primitives[i];
        p.mean = normal * radius;
        // Local z along the outward normal, flattened.
        Vec3 tangent = normal.cross(Vec3{0, 0, 1});
        if (tangent.norm_sq() < 1e-12) tangent = {1, 0, 0};
        tangent = tangent.normalized();
        const Vec3 bitangent = normal.cross(tangent);
        p.rotation = Quat::from_matrix(gsim::Mat3::from_cols(tangent, bitangent, normal));
        p.scale = {tangent_scale, tangent_scale, 0.01 * tangent_scale};
        p.opacity = opacity;
        (void)u01;
    }
    return field;
}

// ---- geometry oracles ------------------------------------------------------

namespace {

double point_segment_dist(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len2 = ab.norm_sq();
    if (len2 < 1e-30) return (p - a).norm();
    const double t = std::clamp(ab.dot(p - a) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

}  // namespace

double point_triangle_dist(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Plane projection when the foot lies inside, else nearest edge.
    const Vec3 n = (b - a).cross(c - a);
    const double nn2 = n.norm_sq();
    if (nn2 < 1e-30)
        return std::min({point_segment_dist(p, a, b), point_segment_dist(p, b, c),
                         point_segment_dist(p, c, a)});
    const Vec3 ap = p - a;
    const double dist_factor = ap.dot(n) / nn2;
    const Vec3 foot = p - n * dist_factor;
    const double u = (c - b).cross(foot - b).dot(n) / nn2;
    const double v = (a - c).cross(foot - c).dot(n) / nn2;
    const double w = 1.0 - u - v;
    if (u >= 0.0 && v >= 0.0 && w >= 0.0) return std::abs(ap.dot(n)) / std::sqrt(nn2);
    return std::min({point_segment_dist(p, a, b), point_segment_dist(p, b, c),
                     point_segment_dist(p, c, a)});
}

namespace {

std::vector<Vec3> sample_surface(const TriangleMesh& mesh, int samples_per_face) {
    std::vector<Vec3> points = mesh.vertices;
    for (const auto& f : mesh.faces) {
        const Vec3& a = mesh.vertices[f[0]];
        const Vec3& b = mesh.vertices[f[1]];
        const Vec3& c = mesh.vertices[f[2]];
        points.push_back((a + b + c) / 3.0);
        if (samples_per_face >= 3) {
            points.push_back(a * 0.5 + b * 0.25 + c * 0.25);
            points.push_back(a * 0.25 + b * 0.5 + c * 0.25);
            points.push_back(a * 0.25 + b * 0.25 + c * 0.5);
        }
    }
    return points;
}

// Uniform grid over triangle bounding boxes for nearest-triangle queries.
struct TriGrid {
    const TriangleMesh& mesh;
    Aabb bounds;
    double cell = 0.0;
    int nx = 0, ny = 0, nz = 0;
    std::vector<std::vector<std::uint32_t>> cells;

    explicit TriGrid(const TriangleMesh& m) : mesh(m) {
        for (const auto& v : m.vertices) bounds.expand(v);
        const Vec3 ext = bounds.extent();
        const double diag = std::max(ext.norm(), 1e-9);
        cell = diag / 32.0;
        nx = std::max(1, static_cast<int>(ext.x / cell) + 1);
        ny = std::max(1, static_cast<int>(ext.y / cell) + 1);
        nz = std::max(1, static_cast<int>(ext.z / cell) + 1);
        cells.resize(static_cast<std::size_t>(nx) * ny * nz);
        for (std::uint32_t f = 0; f < m.faces.size(); ++f) {
            Aabb fb;
            for (int k = 0; k < 3; ++k) fb.expand(m.vertices[m.faces[f][k]]);
            insert(f, fb);
        }
    }
    int clampi(double v, int n) const {
        return std::clamp(static_cast<int>(v), 0, n - 1);
    }
    void insert(std::uint32_t f, const Aabb& fb) {
        const int x0 = clampi((fb.lo.x - bounds.lo.x) / cell, nx);
        const int x1 = clampi((fb.hi.x - bounds.lo.x) / cell, nx);
        const int y0 = clampi((fb.lo.y - bounds.lo.y) / cell, ny);
        const int y1 = clampi((fb.hi.y - bounds.lo.y) / cell, ny);
        const int z0 = clampi((fb.lo.z - bounds.lo.z) / cell, nz);
        const int z1 = clampi((fb.hi.z - bounds.lo.z) / cell, nz);
        for (int z = z0; z <= z1; ++z)
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x)
                    cells[(static_cast<std::size_t>(z) * ny + y) * nx + x].push_back(f);
    }
    double nearest(const Vec3& p) const {
        // Expanding ring search.
        const int cx = clampi((p.x - bounds.lo.x) / cell, nx);
        const int cy = clampi((p.y - bounds.lo.y) / cell, ny);
        const int cz = clampi((p.z - bounds.lo.z) / cell, nz);
        double best = std::numeric_limits<double>::infinity();
        const int max_ring = std::max({nx, ny, nz});
        for (int ring = 0; ring <= max_ring; ++ring) {
            if (best < (ring - 1) * cell && ring > 1) break;
            for (int z = std::max(0, cz - ring); z <= std::min(nz - 1, cz + ring); ++z)
                for (int y = std::max(0, cy - ring); y <= std::min(ny - 1, cy + ring); ++y)
                    for (int x = std::max(0, cx - ring); x <= std::min(nx - 1, cx + ring);
                         ++x) {
                        if (std::max({std::abs(x - cx), std::abs(y - cy),
                                      std::abs(z - cz)}) != ring)
                            continue;
                        for (std::uint32_t f :
                             cells[(static_cast<std::size_t>(z) * ny + y) * nx + x]) {
                            const auto& tri = mesh.faces[f];
                            best = std::min(
                                best, point_triangle_dist(p, mesh.vertices[tri[0]],
                                                          mesh.vertices[tri[1]],
                                                          mesh.vertices[tri[2]]));
                        }
                    }
        }
        return best;
    }
};

}  // namespace

double directed_hausdorff(const TriangleMesh& a, const TriangleMesh& b,
                          int samples_per_face) {
    if (a.faces.empty() || b.faces.empty())
        return std::numeric_limits<double>::infinity();
    const TriGrid grid(b);
    double worst = 0.0;
    for (const Vec3& p : sample_surface(a, samples_per_face))
        worst = std::max(worst, grid.nearest(p));
    return worst;
}

double symmetric_hausdorff(const TriangleMesh& a, const TriangleMesh& b,
                           int samples_per_face) {
    return std::max(directed_hausdorff(a, b, samples_per_face),
                    directed_hausdorff(b, a, samples_per_face));
}

double signed_volume(const TriangleMesh& mesh) {
    double vol = 0.0;
    for (const auto& f : mesh.faces) {
        const Vec3& a = mesh.vertices[f[0]];
        const Vec3& b = mesh.vertices[f[1]];
        const Vec3& c = mesh.vertices[f[2]];
        vol += a.dot(b.cross(c)) / 6.0;
    }
    return vol;
}

EdgeAudit audit_edges(const TriangleMesh& mesh) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> counts;
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k) {
            const std::uint32_t u = f[k], v = f[(k + 1) % 3];
            ++counts[{std::min(u, v), std::max(u, v)}];
        }
    EdgeAudit audit;
    for (const auto& [edge, count] : counts) {
        if (count != 2) ++audit.boundary_edges;
        if (count > 2) ++audit.nonmanifold_edges;
    }
    return audit;
}

// ---- z-buffer mesh rasterizer ----------------------------------------------

ZBuffer rasterize_mesh(const TriangleMesh& mesh, const CameraModel& camera) {
    ZBuffer zb;
    zb.depth = Image1(camera.width, camera.height, 0.0f);
    zb.mask.assign(static_cast<std::size_t>(camera.width) * camera.height, 0);

    for (const auto& f : mesh.faces) {
        Vec3 cam_p[3];
        double u[3], v[3];
        bool in_front = true;
        for (int k = 0; k < 3; ++k) {
            cam_p[k] = camera.pose.transform_point(mesh.vertices[f[k]]);
            if (cam_p[k].z <= camera.near) {
                in_front = false;
                break;
            }
            u[k] = camera.fx * cam_p[k].x / cam_p[k].z + camera.cx;
            v[k] = camera.fy * cam_p[k].y / cam_p[k].z + camera.cy;
        }
        if (!in_front) continue;

        const int x0 = std::max(0, static_cast<int>(std::floor(std::min({u[0], u[1], u[2]}) - 0.5)));
        const int x1 = std::min(camera.width - 1,
                                static_cast<int>(std::ceil(std::max({u[0], u[1], u[2]}))));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min({v[0], v[1], v[2]}) - 0.5)));
        const int y1 = std::min(camera.height - 1,
                                static_cast<int>(std::ceil(std::max({v[0], v[1], v[2]}))));
        const double area = (u[1] - u[0]) * (v[2] - v[0]) - (u[2] - u[0]) * (v[1] - v[0]);
        if (std::abs(area) < 1e-12) continue;

        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double px = x + 0.5, py = y + 0.5;
                const double w0 = ((u[1] - px) * (v[2] - py) - (u[2] - px) * (v[1] - py)) / area;
                const double w1 = ((u[2] - px) * (v[0] - py) - (u[0] - px) * (v[2] - py)) / area;
                const double w2 = 1.0 - w0 - w1;
                if (w0 < 0 || w1 < 0 || w2 < 0) continue;
                // Perspective-correct depth.
                const double inv_z =
                    w0 / cam_p[0].z + w1 / cam_p[1].z + w2 / cam_p[2].z;
                const float z = static_cast<float>(1.0 / inv_z);
                float& slot = zb.depth.at(x, y);
                if (slot == 0.0f || z < slot) slot = z;
                zb.mask[static_cast<std::size_t>(y) * camera.width + x] = 1;
            }
        }
    }
    return zb;
}

double silhouette_iou(const ZBuffer& zb, const Image1& accum_alpha, double alpha_threshold) {
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < zb.mask.size(); ++i) {
        const bool a = zb.mask[i] != 0;
        const bool b = accum_alpha.data[i] >= alpha_threshold;
        inter += (a && b) ? 1 : 0;
        uni += (a || b) ? 1 : 0;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// ---- independent file readers ----------------------------------------------

PfmImage read_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("pfm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "Pf") throw std::runtime_error("pfm: bad magic in " + path);
    PfmImage img;
    double scale;
    in >> img.width >> img.height >> scale;
    in.get();  // single whitespace after the header
    if (scale >= 0) throw std::runtime_error("pfm: expected little-endian (negative scale)");
    img.data.resize(static_cast<std::size_t>(img.width) * img.height);
    // Rows are stored bottom-up.
    for (int y = img.height - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(img.data.data() +
                                        static_cast<std::size_t>(y) * img.width),
                static_cast<std::streamsize>(sizeof(float) * img.width));
    }
    if (!in) throw std::runtime_error("pfm: truncated payload in " + path);
    return img;
}

std::vector<CloudRecord> read_cloud_ply(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("ply: cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line != "ply") throw std::runtime_error("ply: bad magic");
    bool ascii = false;
    std::size_t count = 0;
    std::vector<std::string> props;
    while (std::getline(in, line)) {
        if (line == "end_header") break;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = fmt == "ascii";
        } else if (tok == "element") {
            std::string name;
            ls >> name >> count;
        } else if (tok == "property") {
            std::string type, name;
            ls >> type >> name;
            props.push_back(type + ":" + name);
        }
    }
    const std::vector<std::string> expected = {"float:x", "float:y", "float:z", "int:ring",
                                               "float:azimuth"};
    if (props != expected) throw std::runtime_error("ply: unexpected property layout");
    std::vector<CloudRecord> records(count);
    if (ascii) {
        for (auto& r : records) in >> r.x >> r.y >> r.z >> r.ring >> r.azimuth;
    } else {
        for (auto& r : records) {
            in.read(reinterpret_cast<char*>(&r.x), 4);
            in.read(reinterpret_cast<char*>(&r.y), 4);
            in.read(reinterpret_cast<char*>(&r.z), 4);
            in.read(reinterpret_cast<char*>(&r.ring), 4);
            in.read(reinterpret_cast<char*>(&r.azimuth), 4);
        }
    }
    if (!in) throw std::runtime_error("ply: truncated payload");
    return records;
}

std::vector<CloudRecord> read_cloud_pcd(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("pcd: cannot open " + path);
    std::string line;
    std::size_t count = 0;
    bool ascii = true;
    bool fields_ok = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "FIELDS") {
            std::string rest;
            std::getline(ls, rest);
            fields_ok = rest == " x y z ring azimuth";
        } else if (tok == "POINTS") {
            ls >> count;
        } else if (tok == "DATA") {
            std::string mode;
            ls >> mode;
            ascii = mode == "ascii";
            break;
        }
    }
    if (!fields_ok) throw std::runtime_error("pcd: unexpected FIELDS");
    std::vector<CloudRecord> records(count);
    if (ascii) {
        for (auto& r : records) in >> r.x >> r.y >> r.z >> r.ring >> r.azimuth;
    } else {
        for (auto& r : records) {
            in.read(reinterpret_cast<char*>(&r.x), 4);
            in.read(reinterpret_cast<char*>(&r.y), 4);
            in.read(reinterpret_cast<char*>(&r.z), 4);
            in.read(reinterpret_cast<char*>(&r.ring), 4);
            in.read(reinterpret_cast<char*>(&r.azimuth), 4);
        }
    }
    if (!in) throw std::runtime_error("pcd: truncated payload");
    return records;
}

RawSplatPly read_splat_ply_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("splat ply: cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line != "ply") throw std::runtime_error("splat ply: bad magic");
    RawSplatPly raw;
    while (std::getline(in, line)) {
        if (line == "end_header") break;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "element") {
            std::string name;
            ls >> name >> raw.count;
        } else if (tok == "property") {
            std::string type, name;
            ls >> type >> name;
            raw.properties.push_back(name);
        }
    }
    raw.rows.resize(raw.count * raw.properties.size());
    in.read(reinterpret_cast<char*>(raw.rows.data()),
            static_cast<std::streamsize>(raw.rows.size() * sizeof(float)));
    if (!in) throw std::runtime_error("splat ply: truncated payload");
    return raw;
}

// ---- misc -------------------------------------------------------------------

std::string temp_dir(const std::string& hint) {
    static std::atomic<int> counter{0};
    const fs::path dir = fs::temp_directory_path() /
                         ("gsim_test_" + hint + "_" + std::to_string(::getpid()) + "_" +
                          std::to_string(counter++));
    fs::create_directories(dir);
    return dir.string();
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace oracle
