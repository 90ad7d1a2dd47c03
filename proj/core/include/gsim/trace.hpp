// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "gsim/bvh.hpp"
#include "gsim/gaussian.hpp"

namespace gsim {

// World-posed primitive ready for ray queries: inverse covariance (with the
// scale floor applied so flattened primitives stay invertible) and the
// 3-sigma ellipsoid AABB.
struct PosedPrimitive {
    Vec3 mean;
    Mat3 inv_cov;
    double opacity = 0.0;
    Aabb bounds;
};

inline constexpr double kTraceScaleFloor = 1e-7;  // m
inline constexpr double kBoundsSigma = 3.0;

PosedPrimitive pose_primitive(const GaussianPrimitive& p, const RigidTransform& node_pose);

// Density peak along the ray: t* = (mu-o)^T S^-1 d / (d^T S^-1 d) clamped to
// [0, t_max]; response = opacity * exp(-1/2 (r(t*)-mu)^T S^-1 (r(t*)-mu)).
struct RayPeak {
    double t = 0.0;
    double response = 0.0;
};
RayPeak ray_gaussian_peak(const Ray& ray, const PosedPrimitive& prim);

struct TraceResult {
    bool hit = false;
    double depth = 0.0;  // meters along the ray, renormalized by accumulated alpha
    double accum_alpha = 0.0;
};

// Spinning-scan LiDAR: one ray per (channel, azimuth). azimuth_step must
// divide 2*pi into an integer ray count within 1e-9.
struct LidarModel {
    std::string id;
    std::vector<double> channels;  // elevation angles, radians
    double azimuth_step = 0.0;     // radians
    double max_range = 0.0;        // meters
    RigidTransform pose;           // sensor -> world
    double alpha_threshold = 0.5;  // accumulated alpha declaring a surface
};

void validate_lidar(const LidarModel& lidar);
std::size_t lidar_azimuth_count(const LidarModel& lidar);

// Points in the sensor frame with per-point ring index and azimuth; misses
// are omitted. Order is channel-major, azimuth ascending.
struct PointCloud {
    std::vector<Vec3> points;
    std::vector<std::uint32_t> ring;
    std::vector<double> azimuth;

    std::size_t size() const { return points.size(); }
};

// BVH-accelerated ray tracing over a posed Gaussian field. Construction
// poses every primitive into the world frame; queries are pure reads.
class GaussianBvh {
public:
    static GaussianBvh build(const GaussianField& field, const std::vector<SceneNode>& nodes);

    // Front-to-back composite over candidates gathered through the BVH,
    // ordered by ascending peak position. Hit once accumulated alpha reaches
    // the threshold; depth renormalized by accumulated alpha.
    TraceResult trace(const Ray& ray, double alpha_threshold = 0.5) const;

    // Reference traversal: scans every primitive with the same per-primitive
    // test and compositing. The BVH path must match it exactly.
    TraceResult trace_linear(const Ray& ray, double alpha_threshold = 0.5) const;

    PointCloud scan(const LidarModel& lidar) const;

    const std::vector<PosedPrimitive>& primitives() const { return posed_; }
    const Bvh& tree() const { return bvh_; }
    bool empty() const { return posed_.empty(); }

private:
    std::vector<PosedPrimitive> posed_;
    Bvh bvh_;
};

}  // namespace gsim
