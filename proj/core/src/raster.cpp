// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/raster.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "gsim/errors.hpp"
#include "gsim/parallel.hpp"
#include "gsim/sh.hpp"

namespace gsim {

void validate_camera(const CameraModel& cam) {
    if (!(cam.fx > 0.0) || !(cam.fy > 0.0))
        throw validation_error("camera '" + cam.id + "': fx, fy must be positive");
    if (!(cam.near > 0.0) || !(cam.far > cam.near))
        throw validation_error("camera '" + cam.id + "': need 0 < near < far");
    if (cam.width < 16 || cam.height < 16)
        throw validation_error("camera '" + cam.id + "': resolution below 16x16");
}

CameraModel CameraModel::look_at(const Vec3& eye, const Vec3& target, double fx, double fy,
                                 int width, int height, const Vec3& up) {
    CameraModel cam;
    cam.fx = fx;
    cam.fy = fy;
    cam.cx = width * 0.5;
    cam.cy = height * 0.5;
    cam.width = width;
    cam.height = height;
    const Vec3 forward = (target - eye).normalized();
    Vec3 right = forward.cross(up).normalized();
    if (right.norm_sq() < 1e-20) right = forward.cross(Vec3{0, 1, 0}).normalized();
    const Vec3 down = forward.cross(right);  // camera y points down in the image
    const Mat3 world_to_cam = Mat3::from_rows(right, down, forward);
    cam.pose.rotation = Quat::from_matrix(world_to_cam);
    cam.pose.translation = -(cam.pose.rotation.rotate(eye));
    return cam;
}

namespace {

// Per-primitive node pose table: index 0 is identity for uncovered primitives.
struct PoseTable {
    std::vector<RigidTransform> poses{RigidTransform::identity()};
    std::vector<std::uint32_t> of_primitive;

    PoseTable(const GaussianField& field, const std::vector<SceneNode>& nodes)
        : of_primitive(field.size(), 0) {
        for (const auto& node : nodes) {
            if (node.range.end > field.size())
                throw validation_error("node '" + node.id + "' range exceeds field size");
            poses.push_back(node.pose);
            const auto pose_idx = static_cast<std::uint32_t>(poses.size() - 1);
            for (std::size_t i = node.range.begin; i < node.range.end; ++i)
                of_primitive[i] = pose_idx;
        }
    }
};

}  // namespace

std::vector<ProjectedSplat> project(const GaussianField& field,
                                    const std::vector<SceneNode>& nodes,
                                    const CameraModel& camera) {
    validate_camera(camera);
    const PoseTable table(field, nodes);

    const Mat3 r_wc = camera.pose.rotation.to_matrix();
    const Vec3 cam_center = camera.camera_center();
    const double tan_fovx = camera.width / (2.0 * camera.fx);
    const double tan_fovy = camera.height / (2.0 * camera.fy);
    const double limx = 1.3 * tan_fovx;
    const double limy = 1.3 * tan_fovy;

    const std::size_t n = field.size();
    std::vector<ProjectedSplat> scratch(n);
    std::vector<char> alive(n, 0);

    parallel_for(n, [&](std::size_t i) {
        const GaussianPrimitive& p = field.primitives[i];
        const RigidTransform& node_pose = table.poses[table.of_primitive[i]];

        const Vec3 mean_world = node_pose.transform_point(p.mean);
        const Vec3 mean_cam = camera.pose.transform_point(mean_world);
        const double z = mean_cam.z;
        if (!(z > camera.near) || !(z < camera.far)) return;

        const double u = camera.fx * mean_cam.x / z + camera.cx;
        const double v = camera.fy * mean_cam.y / z + camera.cy;

        // World covariance with the node rotation composed, then into camera frame.
        const Quat rot_world = node_pose.rotation * p.rotation;
        const Mat3 r = rot_world.to_matrix();
        const Mat3 cov_world =
            r * Mat3::diag(p.scale.x * p.scale.x, p.scale.y * p.scale.y,
                           p.scale.z * p.scale.z) *
            r.transposed();
        const Mat3 cov_cam = r_wc * cov_world * r_wc.transposed();

        // Local-affine Jacobian of the perspective map, with the standard
        // frustum clamp for stability near the image border.
        const double tx = std::clamp(mean_cam.x / z, -limx, limx) * z;
        const double ty = std::clamp(mean_cam.y / z, -limy, limy) * z;
        const double j00 = camera.fx / z;
        const double j02 = -camera.fx * tx / (z * z);
        const double j11 = camera.fy / z;
        const double j12 = -camera.fy * ty / (z * z);

        // cov2d = J * cov_cam * J^T for the 2x3 Jacobian rows above.
        const double a = j00 * (j00 * cov_cam(0, 0) + j02 * cov_cam(2, 0)) +
                         j02 * (j00 * cov_cam(0, 2) + j02 * cov_cam(2, 2));
        const double b = j00 * (j11 * cov_cam(0, 1) + j12 * cov_cam(0, 2)) +
                         j02 * (j11 * cov_cam(2, 1) + j12 * cov_cam(2, 2));
        const double c = j11 * (j11 * cov_cam(1, 1) + j12 * cov_cam(2, 1)) +
                         j12 * (j11 * cov_cam(1, 2) + j12 * cov_cam(2, 2));

        const double cov_xx = a + kCovarianceFloor;
        const double cov_xy = b;
        const double cov_yy = c + kCovarianceFloor;

        const double det = cov_xx * cov_yy - cov_xy * cov_xy;
        if (!(det > 0.0) || !std::isfinite(det)) return;

        const double mid = 0.5 * (cov_xx + cov_yy);
        const double lambda_max = mid + std::sqrt(std::max(0.0, mid * mid - det));
        const double radius = 3.0 * std::sqrt(lambda_max);

        if (u + radius < 0.0 || u - radius > camera.width || v + radius < 0.0 ||
            v - radius > camera.height)
            return;

        Vec3 view_dir = mean_world - cam_center;
        const double dn = view_dir.norm();
        if (dn > 0.0) view_dir = view_dir / dn;
        const Vec3 view_local = node_pose.rotation.inverse_rotate(view_dir);

        ProjectedSplat s;
        s.pixel_center = {u, v};
        s.cov_xx = cov_xx;
        s.cov_xy = cov_xy;
        s.cov_yy = cov_yy;
        s.inv_xx = cov_yy / det;
        s.inv_xy = -cov_xy / det;
        s.inv_yy = cov_xx / det;
        s.view_depth = z;
        s.alpha_peak = p.opacity;
        s.rgb = shade_sh(p.sh, field.sh_degree, view_local);
        s.radius = radius;
        s.prim_index = static_cast<std::uint32_t>(i);
        scratch[i] = s;
        alive[i] = 1;
    });

    std::vector<ProjectedSplat> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (alive[i]) out.push_back(scratch[i]);
    return out;
}

RenderTarget rasterize(const std::vector<ProjectedSplat>& splats, const CameraModel& camera,
                       const RasterOptions& options) {
    const int width = camera.width;
    const int height = camera.height;
    RenderTarget target(width, height);

    const int tiles_x = (width + kTileSize - 1) / kTileSize;
    const int tiles_y = (height + kTileSize - 1) / kTileSize;

    // (tile id, float depth) packed into a 64-bit key; emission in splat order
    // plus the index payload makes the sort a stable depth-then-index order.
    std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs;
    for (std::uint32_t s = 0; s < splats.size(); ++s) {
        const ProjectedSplat& sp = splats[s];
        const double u = sp.pixel_center.x, v = sp.pixel_center.y, r = sp.radius;
        int tx0 = static_cast<int>(std::floor((u - r) / kTileSize));
        int tx1 = static_cast<int>(std::floor((u + r) / kTileSize));
        int ty0 = static_cast<int>(std::floor((v - r) / kTileSize));
        int ty1 = static_cast<int>(std::floor((v + r) / kTileSize));
        if (tx1 < 0 || tx0 >= tiles_x || ty1 < 0 || ty0 >= tiles_y) continue;
        tx0 = std::max(tx0, 0);
        ty0 = std::max(ty0, 0);
        tx1 = std::min(tx1, tiles_x - 1);
        ty1 = std::min(ty1, tiles_y - 1);
        const std::uint64_t depth_bits = depth_sort_key(sp.view_depth);
        for (int ty = ty0; ty <= ty1; ++ty)
            for (int tx = tx0; tx <= tx1; ++tx) {
                const std::uint64_t tile = static_cast<std::uint64_t>(ty) * tiles_x + tx;
                pairs.emplace_back((tile << 32) | depth_bits, s);
            }
    }
    std::sort(pairs.begin(), pairs.end());

    // Tile ranges in the sorted pair list.
    const std::size_t tile_count = static_cast<std::size_t>(tiles_x) * tiles_y;
    std::vector<std::size_t> tile_begin(tile_count + 1, 0);
    for (const auto& pr : pairs) ++tile_begin[(pr.first >> 32) + 1];
    for (std::size_t t = 1; t <= tile_count; ++t) tile_begin[t] += tile_begin[t - 1];

    parallel_for(tile_count, [&](std::size_t tile) {
        const std::size_t begin = tile_begin[tile];
        const std::size_t end = tile_begin[tile + 1];
        if (begin == end) return;
        const int tx = static_cast<int>(tile % tiles_x);
        const int ty = static_cast<int>(tile / tiles_x);
        const int x0 = tx * kTileSize;
        const int y0 = ty * kTileSize;
        const int x1 = std::min(x0 + kTileSize, width);
        const int y1 = std::min(y0 + kTileSize, height);

        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                const double px = x + 0.5;
                const double py = y + 0.5;
                double cr = 0.0, cg = 0.0, cb = 0.0, d = 0.0, acc = 0.0;
                double transmittance = 1.0;
                for (std::size_t k = begin; k < end; ++k) {
                    const ProjectedSplat& sp = splats[pairs[k].second];
                    const double dx = sp.pixel_center.x - px;
                    const double dy = sp.pixel_center.y - py;
                    if (std::abs(dx) > sp.radius || std::abs(dy) > sp.radius) continue;
                    const double q =
                        sp.inv_xx * dx * dx + 2.0 * sp.inv_xy * dx * dy + sp.inv_yy * dy * dy;
                    const double alpha =
                        std::min(sp.alpha_peak * std::exp(-0.5 * q), kAlphaClamp);
                    if (alpha < kAlphaSkip) continue;
                    const double w = alpha * transmittance;
                    cr += sp.rgb.x * w;
                    cg += sp.rgb.y * w;
                    cb += sp.rgb.z * w;
                    d += sp.view_depth * w;
                    acc += w;
                    transmittance *= 1.0 - alpha;
                    if (transmittance < options.transmittance_cutoff) break;
                }
                float* rgb = target.rgb.px(x, y);
                rgb[0] = static_cast<float>(std::clamp(cr, 0.0, 1.0));
                rgb[1] = static_cast<float>(std::clamp(cg, 0.0, 1.0));
                rgb[2] = static_cast<float>(std::clamp(cb, 0.0, 1.0));
                if (options.normalize_depth)
                    target.depth.at(x, y) = acc > 1e-12 ? static_cast<float>(d / acc) : 0.0f;
                else
                    target.depth.at(x, y) = static_cast<float>(d);
                target.accum_alpha.at(x, y) = static_cast<float>(acc);
            }
        }
    });

    return target;
}

std::vector<RenderTarget> render(const GaussianField& field,
                                 const std::vector<SceneNode>& nodes,
                                 const std::vector<CameraModel>& cameras,
                                 const RasterOptions& options) {
    std::vector<RenderTarget> targets(cameras.size());
    parallel_for(cameras.size(), [&](std::size_t c) {
        targets[c] = rasterize(project(field, nodes, cameras[c]), cameras[c], options);
    });
    return targets;
}

}  // namespace gsim
