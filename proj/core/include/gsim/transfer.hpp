// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "gsim/camera.hpp"
#include "gsim/gaussian.hpp"
#include "gsim/image.hpp"
#include "gsim/mesh.hpp"

namespace gsim {

// Ratio of the normal-axis scale to the tangent scale for facet primitives;
// keeps the (near-planar) covariance invertible for the ray tracer.
inline constexpr double kFlattenEpsilon = 0.01;
inline constexpr double kFacetOpacity = 0.9;

// One Gaussian per facet: mean at the barycenter, local z axis aligned with
// the face normal (first tangent axis along the longest edge, lowest-index
// tie-break), tangent scales equal to the mean barycenter-to-vertex distance,
// SH degree 0 from the interpolated vertex color (mid-gray when colorless).
GaussianField mesh_to_gaussians(const TriangleMesh& mesh);

struct DepthView {
    CameraModel camera;
    Image1 depth;  // meters, normalized by accumulated alpha; 0 marks invalid
};

// Cameras on a view sphere: n_views azimuths x 3 elevation rings (-30/0/+30
// degrees) looking at the field's bounding-box center from the given radius.
// Depth is alpha-normalized; pixels below accumulated alpha 0.5 are invalid.
std::vector<DepthView> render_depth_ring(const GaussianField& field, int n_views,
                                         double radius, int resolution);

// Truncated signed distance volume fused from depth maps (positive outside).
struct TsdfVolume {
    Vec3 origin;
    double voxel_size = 0.0;
    std::array<int, 3> dims{0, 0, 0};
    std::vector<double> tsdf;     // in [-1, 1], 1 where unobserved
    std::vector<double> weights;  // >= 0
    double truncation = 0.0;      // meters, >= 2 * voxel_size

    static TsdfVolume create(const Vec3& origin, double voxel_size,
                             const std::array<int, 3>& dims, double truncation);

    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * dims[1] + y) * dims[0] + x;
    }
    Vec3 voxel_center(int x, int y, int z) const {
        return origin + Vec3{(x + 0.5) * voxel_size, (y + 0.5) * voxel_size,
                             (z + 0.5) * voxel_size};
    }
    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }

    // Debug dump: small text header followed by the float32 tsdf and weight
    // grids, x-fastest.
    void save_raw(const std::string& path) const;
};

// Projective TSDF update: per voxel, sdf = measured depth - voxel camera
// depth; voxels with sdf > -truncation take a weight-1 running average of
// clamp(sdf/truncation, -1, 1).
void tsdf_fuse(TsdfVolume& volume, const CameraModel& camera, const Image1& depth);

// Marching-cubes triangulation of the tsdf = 0 isosurface over voxels with
// weight > 0; vertices at linearly interpolated edge crossings, welded so the
// interior surface is watertight. Ambiguous faces resolved by the asymptotic
// decider so neighboring cells always agree.
TriangleMesh extract_mesh(const TsdfVolume& volume);

// Quadric-error edge collapse until face count <= target_faces. Boundary
// edges are collapse-protected. target_faces < 4 -> validation_error.
TriangleMesh decimate(const TriangleMesh& mesh, std::size_t target_faces);

// Full pipeline: render_depth_ring -> tsdf_fuse per view -> extract_mesh ->
// decimate. The fused volume is copied out when fused_volume is non-null.
TriangleMesh gaussians_to_mesh(const GaussianField& field, double voxel_size,
                               std::size_t target_faces,
                               TsdfVolume* fused_volume = nullptr);

// Largest distance from any sampled point to the mesh surface (used by the
// conversion CLI as a self-check against a resampling of the field).
double max_distance_to_mesh(const std::vector<Vec3>& points, const TriangleMesh& mesh);
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace gsim
