// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/trace.hpp"

#include <algorithm>
#include <cmath>

#include "gsim/errors.hpp"
#include "gsim/parallel.hpp"

namespace gsim {

PosedPrimitive pose_primitive(const GaussianPrimitive& p, const RigidTransform& node_pose) {
    PosedPrimitive out;
    out.mean = node_pose.transform_point(p.mean);
    out.opacity = p.opacity;

    const Quat rot_world = node_pose.rotation * p.rotation;
    const Mat3 r = rot_world.to_matrix();
    const double sx = std::max(p.scale.x, kTraceScaleFloor);
    const double sy = std::max(p.scale.y, kTraceScaleFloor);
    const double sz = std::max(p.scale.z, kTraceScaleFloor);
    out.inv_cov = r * Mat3::diag(1.0 / (sx * sx), 1.0 / (sy * sy), 1.0 / (sz * sz)) *
                  r.transposed();

    // AABB of the 3-sigma ellipsoid: half extent per axis is 3*sqrt(Sigma_ii).
    const Mat3 cov =
        r * Mat3::diag(p.scale.x * p.scale.x, p.scale.y * p.scale.y, p.scale.z * p.scale.z) *
        r.transposed();
    const Vec3 half{kBoundsSigma * std::sqrt(cov(0, 0)), kBoundsSigma * std::sqrt(cov(1, 1)),
                    kBoundsSigma * std::sqrt(cov(2, 2))};
    out.bounds.expand(out.mean - half);
    out.bounds.expand(out.mean + half);
    return out;
}

RayPeak ray_gaussian_peak(const Ray& ray, const PosedPrimitive& prim) {
    const Vec3 to_mean = prim.mean - ray.origin;
    const Vec3 si_d = prim.inv_cov * ray.direction;
    const double denom = ray.direction.dot(si_d);
    RayPeak peak;
    if (!(denom > 0.0)) return peak;  // response stays 0
    peak.t = std::clamp(to_mean.dot(si_d) / denom, 0.0, ray.t_max);
    const Vec3 delta = ray.origin + ray.direction * peak.t - prim.mean;
    const double q = delta.dot(prim.inv_cov * delta);
    peak.response = prim.opacity * std::exp(-0.5 * q);
    return peak;
}

namespace {

struct Candidate {
    double t;
    double response;
    std::uint32_t index;
};

constexpr double kTraceAlphaClamp = 0.99;
constexpr double kTraceAlphaSkip = 1.0 / 255.0;
constexpr double kTraceTransmittanceCutoff = 1e-4;

TraceResult composite(std::vector<Candidate>& candidates, double alpha_threshold) {
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return a.t != b.t ? a.t < b.t : a.index < b.index;
    });
    double depth_sum = 0.0, acc = 0.0, transmittance = 1.0;
    for (const Candidate& c : candidates) {
        const double alpha = std::min(c.response, kTraceAlphaClamp);
        if (alpha < kTraceAlphaSkip) continue;
        const double w = alpha * transmittance;
        depth_sum += c.t * w;
        acc += w;
        transmittance *= 1.0 - alpha;
        if (transmittance < kTraceTransmittanceCutoff) break;
    }
    TraceResult result;
    result.accum_alpha = acc;
    if (acc >= alpha_threshold) {
        result.hit = true;
        result.depth = depth_sum / acc;
    }
    return result;
}

}  // namespace

GaussianBvh GaussianBvh::build(const GaussianField& field,
                               const std::vector<SceneNode>& nodes) {
    GaussianBvh out;
    out.posed_.resize(field.size());

    std::vector<RigidTransform> poses{RigidTransform::identity()};
    std::vector<std::uint32_t> pose_of(field.size(), 0);
    for (const auto& node : nodes) {
        if (node.range.end > field.size())
            throw validation_error("node '" + node.id + "' range exceeds field size");
        poses.push_back(node.pose);
        for (std::size_t i = node.range.begin; i < node.range.end; ++i)
            pose_of[i] = static_cast<std::uint32_t>(poses.size() - 1);
    }

    parallel_for(field.size(), [&](std::size_t i) {
        out.posed_[i] = pose_primitive(field.primitives[i], poses[pose_of[i]]);
    });

    std::vector<Aabb> boxes(out.posed_.size());
    for (std::size_t i = 0; i < out.posed_.size(); ++i) boxes[i] = out.posed_[i].bounds;
    out.bvh_ = Bvh::build(boxes);
    return out;
}

TraceResult GaussianBvh::trace(const Ray& ray, double alpha_threshold) const {
    const Vec3 inv{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
    std::vector<Candidate> candidates;
    bvh_.for_each_candidate(ray, [&](std::uint32_t i) {
        const PosedPrimitive& prim = posed_[i];
        if (!ray_aabb_hit(prim.bounds, ray.origin, inv, ray.t_max)) return;
        const RayPeak peak = ray_gaussian_peak(ray, prim);
        candidates.push_back({peak.t, peak.response, i});
    });
    return composite(candidates, alpha_threshold);
}

TraceResult GaussianBvh::trace_linear(const Ray& ray, double alpha_threshold) const {
    const Vec3 inv{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
    std::vector<Candidate> candidates;
    for (std::uint32_t i = 0; i < posed_.size(); ++i) {
        const PosedPrimitive& prim = posed_[i];
        if (!ray_aabb_hit(prim.bounds, ray.origin, inv, ray.t_max)) continue;
        const RayPeak peak = ray_gaussian_peak(ray, prim);
        candidates.push_back({peak.t, peak.response, i});
    }
    return composite(candidates, alpha_threshold);
}

void validate_lidar(const LidarModel& lidar) {
    if (lidar.channels.empty())
        throw validation_error("lidar '" + lidar.id + "': no channels");
    for (double e : lidar.channels)
        if (!std::isfinite(e))
            throw validation_error("lidar '" + lidar.id + "': non-finite elevation");
    if (!(lidar.azimuth_step > 0.0))
        throw validation_error("lidar '" + lidar.id + "': azimuth_step must be positive");
    const double n = kTwoPi / lidar.azimuth_step;
    if (std::abs(n - std::round(n)) * lidar.azimuth_step > 1e-9)
        throw validation_error("lidar '" + lidar.id +
                               "': azimuth_step must divide 2*pi into an integer ray count");
    if (!(lidar.max_range > 0.0))
        throw validation_error("lidar '" + lidar.id + "': max_range must be positive");
    if (!(lidar.alpha_threshold > 0.0) || lidar.alpha_threshold > 1.0)
        throw validation_error("lidar '" + lidar.id + "': alpha_threshold outside (0,1]");
}

std::size_t lidar_azimuth_count(const LidarModel& lidar) {
    return static_cast<std::size_t>(std::llround(kTwoPi / lidar.azimuth_step));
}

PointCloud GaussianBvh::scan(const LidarModel& lidar) const {
    validate_lidar(lidar);
    const std::size_t azimuths = lidar_azimuth_count(lidar);
    const std::size_t ray_count = lidar.channels.size() * azimuths;

    struct Return {
        char hit = 0;
        Vec3 point;
    };
    std::vector<Return> returns(ray_count);

    parallel_for(ray_count, [&](std::size_t k) {
        const std::size_t channel = k / azimuths;
        const std::size_t step = k % azimuths;
        const double elevation = lidar.channels[channel];
        const double azimuth = static_cast<double>(step) * lidar.azimuth_step;
        const double ce = std::cos(elevation);
        const Vec3 dir_sensor{ce * std::cos(azimuth), ce * std::sin(azimuth),
                              std::sin(elevation)};
        Ray ray;
        ray.origin = lidar.pose.translation;
        ray.direction = lidar.pose.rotation.rotate(dir_sensor);
        ray.t_max = lidar.max_range;
        const TraceResult result = trace(ray, lidar.alpha_threshold);
        if (result.hit) {
            returns[k].hit = 1;
            returns[k].point = dir_sensor * result.depth;
        }
    });

    PointCloud cloud;
    for (std::size_t k = 0; k < ray_count; ++k) {
        if (!returns[k].hit) continue;
        cloud.points.push_back(returns[k].point);
        cloud.ring.push_back(static_cast<std::uint32_t>(k / azimuths));
        cloud.azimuth.push_back(static_cast<double>(k % azimuths) * lidar.azimuth_step);
    }
    return cloud;
}

}  // namespace gsim
