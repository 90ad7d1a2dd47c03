// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "gsim/errors.hpp"
#include "gsim/parallel.hpp"
#include "gsim/raster.hpp"
#include "gsim/sh.hpp"
#include "gsim/trace.hpp"

namespace gsim {

namespace {

constexpr double kRingElevations[3] = {-kPi / 6.0, 0.0, kPi / 6.0};
constexpr double kDepthValidAlpha = 0.5;
constexpr double kRingRadiusFactor = 2.5;  // x bbox diagonal
constexpr int kFusionAzimuths = 20;
constexpr int kFusionResolution = 256;

Aabb field_bounds(const GaussianField& field) {
    Aabb box;
    for (const auto& p : field.primitives) {
        const PosedPrimitive posed = pose_primitive(p, RigidTransform::identity());
        box.expand(posed.bounds);
    }
    return box;
}

}  // namespace

GaussianField mesh_to_gaussians(const TriangleMesh& mesh) {
    validate_mesh(mesh);
    GaussianField field;
    field.sh_degree = 0;
    field.primitives.reserve(mesh.faces.size());

    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& face = mesh.faces[f];
        const Vec3 v0 = mesh.vertices[face[0]];
        const Vec3 v1 = mesh.vertices[face[1]];
        const Vec3 v2 = mesh.vertices[face[2]];

        GaussianPrimitive p;
        p.mean = (v0 + v1 + v2) / 3.0;

        // First tangent axis along the longest edge; ties pick the edge
        // starting at the lowest corner index.
        const Vec3 edges[3] = {v1 - v0, v2 - v1, v0 - v2};
        int longest = 0;
        for (int k = 1; k < 3; ++k)
            if (edges[k].norm_sq() > edges[longest].norm_sq()) longest = k;
        const Vec3 tangent = edges[longest].normalized();
        const Vec3 normal = (v1 - v0).cross(v2 - v0).normalized();
        const Vec3 bitangent = normal.cross(tangent);
        p.rotation = Quat::from_matrix(Mat3::from_cols(tangent, bitangent, normal));

        const double m = ((v0 - p.mean).norm() + (v1 - p.mean).norm() +
                          (v2 - p.mean).norm()) / 3.0;
        p.scale = {m, m, kFlattenEpsilon * m};
        p.opacity = kFacetOpacity;

        Vec3 rgb{0.5, 0.5, 0.5};
        if (mesh.has_colors())
            rgb = (mesh.colors[face[0]] + mesh.colors[face[1]] + mesh.colors[face[2]]) / 3.0;
        p.set_sh(0, 0, (rgb.x - 0.5) / kSh0);
        p.set_sh(1, 0, (rgb.y - 0.5) / kSh0);
        p.set_sh(2, 0, (rgb.z - 0.5) / kSh0);

        field.primitives.push_back(p);
    }
    return field;
}

std::vector<DepthView> render_depth_ring(const GaussianField& field, int n_views,
                                         double radius, int resolution) {
    if (field.empty()) throw validation_error("render_depth_ring: empty field");
    if (n_views < 8) throw validation_error("render_depth_ring: n_views must be >= 8");
    if (!(radius > 0.0)) throw validation_error("render_depth_ring: radius must be positive");

    const Aabb box = field_bounds(field);
    const Vec3 extent = box.extent();
    const double diag = extent.norm();
    if (!(diag > 0.0))
        throw validation_error("render_depth_ring: degenerate field bounding box");
    const Vec3 center = box.center();

    // Focal length so the bounding sphere fits with margin.
    const double tan_half = 0.65 * diag / radius;
    const double focal = 0.5 * resolution / tan_half;

    RasterOptions options;
    options.normalize_depth = true;

    std::vector<DepthView> views;
    views.reserve(static_cast<std::size_t>(n_views) * 3);
    for (double elevation : kRingElevations) {
        for (int k = 0; k < n_views; ++k) {
            const double azimuth = kTwoPi * k / n_views;
            const Vec3 dir{std::cos(elevation) * std::cos(azimuth),
                           std::cos(elevation) * std::sin(azimuth), std::sin(elevation)};
            const Vec3 eye = center + dir * radius;
            CameraModel cam =
                CameraModel::look_at(eye, center, focal, focal, resolution, resolution);
            cam.near = std::max(1e-4, radius - diag);
            cam.far = radius + diag;

            RenderTarget target = rasterize(project(field, {}, cam), cam, options);
            DepthView view;
            view.camera = cam;
            view.depth = std::move(target.depth);
            for (std::size_t i = 0; i < view.depth.data.size(); ++i)
                if (target.accum_alpha.data[i] < kDepthValidAlpha) view.depth.data[i] = 0.0f;
            views.push_back(std::move(view));
        }
    }
    return views;
}

TsdfVolume TsdfVolume::create(const Vec3& origin, double voxel_size,
                              const std::array<int, 3>& dims, double truncation) {
    if (!(voxel_size > 0.0)) throw validation_error("tsdf: voxel_size must be positive");
    if (dims[0] < 2 || dims[1] < 2 || dims[2] < 2)
        throw validation_error("tsdf: dims must be at least 2 per axis");
    if (truncation < 2.0 * voxel_size)
        throw validation_error("tsdf: truncation must be >= 2 * voxel_size");
    TsdfVolume v;
    v.origin = origin;
    v.voxel_size = voxel_size;
    v.dims = dims;
    v.truncation = truncation;
    v.tsdf.assign(v.voxel_count(), 1.0);
    v.weights.assign(v.voxel_count(), 0.0);
    return v;
}

void tsdf_fuse(TsdfVolume& volume, const CameraModel& camera, const Image1& depth) {
    validate_camera(camera);
    if (depth.width != camera.width || depth.height != camera.height)
        throw validation_error("tsdf_fuse: depth image does not match camera resolution");

    const std::size_t slab = static_cast<std::size_t>(volume.dims[0]) * volume.dims[1];
    parallel_for(static_cast<std::size_t>(volume.dims[2]), [&](std::size_t z) {
        std::size_t idx = z * slab;
        for (int y = 0; y < volume.dims[1]; ++y) {
            for (int x = 0; x < volume.dims[0]; ++x, ++idx) {
                const Vec3 p = volume.voxel_center(x, y, static_cast<int>(z));
                const Vec3 cam_p = camera.pose.transform_point(p);
                if (cam_p.z <= 0.0) continue;
                const int px = static_cast<int>(
                    std::floor(camera.fx * cam_p.x / cam_p.z + camera.cx));
                const int py = static_cast<int>(
                    std::floor(camera.fy * cam_p.y / cam_p.z + camera.cy));
                if (px < 0 || px >= depth.width || py < 0 || py >= depth.height) continue;
                const double measured = depth.at(px, py);
                if (measured <= 0.0) continue;  // invalid pixel
                const double sdf = measured - cam_p.z;
                if (sdf <= -volume.truncation) continue;
                const double clamped = std::clamp(sdf / volume.truncation, -1.0, 1.0);
                const double w = volume.weights[idx];
                volume.tsdf[idx] = (volume.tsdf[idx] * w + clamped) / (w + 1.0);
                volume.weights[idx] = w + 1.0;
            }
        }
    });
}

TriangleMesh gaussians_to_mesh(const GaussianField& field, double voxel_size,
                               std::size_t target_faces, TsdfVolume* fused_volume) {
    if (field.empty()) throw validation_error("gaussians_to_mesh: empty field");
    if (!(voxel_size > 0.0))
        throw validation_error("gaussians_to_mesh: voxel_size must be positive");

    const Aabb box = field_bounds(field);
    const double diag = box.extent().norm();
    if (!(diag > 0.0))
        throw validation_error("gaussians_to_mesh: degenerate field bounding box");

    const double truncation = 3.0 * voxel_size;
    const double margin = truncation + 2.0 * voxel_size;
    const Vec3 lo = box.lo - Vec3{margin, margin, margin};
    const Vec3 hi = box.hi + Vec3{margin, margin, margin};
    const Vec3 extent = hi - lo;
    const std::array<int, 3> dims{
        std::max(2, static_cast<int>(std::ceil(extent.x / voxel_size)) + 1),
        std::max(2, static_cast<int>(std::ceil(extent.y / voxel_size)) + 1),
        std::max(2, static_cast<int>(std::ceil(extent.z / voxel_size)) + 1)};
    TsdfVolume volume = TsdfVolume::create(lo, voxel_size, dims, truncation);

    const double radius = kRingRadiusFactor * diag;
    const auto views = render_depth_ring(field, kFusionAzimuths, radius, kFusionResolution);
    for (const auto& view : views) tsdf_fuse(volume, view.camera, view.depth);
    if (fused_volume) *fused_volume = volume;

    TriangleMesh mesh = extract_mesh(volume);
    if (mesh.faces.size() > target_faces) mesh = decimate(mesh, target_faces);
    return mesh;
}

void TsdfVolume::save_raw(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    char header[256];
    std::snprintf(header, sizeof(header),
                  "gsim_tsdf 1\ndims %d %d %d\nvoxel_size %.17g\norigin %.17g %.17g "
                  "%.17g\ntruncation %.17g\nend\n",
                  dims[0], dims[1], dims[2], voxel_size, origin.x, origin.y, origin.z,
                  truncation);
    out << header;
    std::vector<float> buffer(voxel_count());
    for (std::size_t i = 0; i < buffer.size(); ++i) buffer[i] = static_cast<float>(tsdf[i]);
    out.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size() * sizeof(float)));
    for (std::size_t i = 0; i < buffer.size(); ++i)
        buffer[i] = static_cast<float>(weights[i]);
    out.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size() * sizeof(float)));
    if (!out) throw io_error("write failed for '" + path + "'");
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Ericson, Real-Time Collision Detection, closest point on triangle.
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        return (p - (a + ab * v)).norm();
    }
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        return (p - (a + ac * w)).norm();
    }
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (p - (b + (c - b) * w)).norm();
    }
    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return (p - (a + ab * v + ac * w)).norm();
}

double max_distance_to_mesh(const std::vector<Vec3>& points, const TriangleMesh& mesh) {
    if (mesh.faces.empty() || points.empty())
        return std::numeric_limits<double>::infinity();
    std::vector<double> per_point(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& f : mesh.faces) {
            best = std::min(best,
                            point_triangle_distance(points[i], mesh.vertices[f[0]],
                                                    mesh.vertices[f[1]], mesh.vertices[f[2]]));
        }
        per_point[i] = best;
    });
    double worst = 0.0;
    for (double d : per_point) worst = std::max(worst, d);
    return worst;
}

}  // namespace gsim
