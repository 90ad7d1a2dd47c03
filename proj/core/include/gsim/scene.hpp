// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "gsim/camera.hpp"
#include "gsim/gaussian.hpp"
#include "gsim/image.hpp"
#include "gsim/pose_stream.hpp"
#include "gsim/raster.hpp"
#include "gsim/trace.hpp"

namespace gsim {

struct MountedCamera {
    CameraModel model;  // intrinsics; pose unused, resolved per frame
    std::string parent;
    RigidTransform mount;  // sensor -> parent frame
};

struct MountedLidar {
    LidarModel model;
    std::string parent;
    RigidTransform mount;
};

// Scene: one Gaussian field partitioned into nodes, plus mounted sensors.
// Loaded from a JSON manifest listing nodes (id, kind, splat path, optional
// mesh path, initial pose) and sensor rigs.
class Scene {
public:
    // Throws io_error on missing assets, validation_error on duplicate node
    // ids or a background-node count other than one.
    static Scene load(const std::string& manifest_path);

    // Advances interactive nodes to the stream poses interpolated at time t
    // (t may not go backwards). Records for unknown or background nodes are
    // rejected. The background never moves.
    void step_to(const PoseStream& stream, double t);

    // Sensor world poses resolved through the parent node.
    CameraModel camera(const std::string& id) const;  // pose set to world->camera
    LidarModel lidar(const std::string& id) const;    // pose set to sensor->world
    std::vector<std::string> camera_ids() const;
    std::vector<std::string> lidar_ids() const;

    std::vector<RenderTarget> render_all(const std::vector<CameraModel>& cameras,
                                         const RasterOptions& options = {}) const;

    const GaussianField& field() const { return field_; }
    const std::vector<SceneNode>& nodes() const { return nodes_; }
    std::vector<SceneNode>& nodes() { return nodes_; }
    const std::vector<MountedCamera>& mounted_cameras() const { return cameras_; }
    const std::vector<MountedLidar>& mounted_lidars() const { return lidars_; }
    const std::map<std::string, std::string>& mesh_paths() const { return mesh_paths_; }
    double clock() const { return clock_; }

private:
    const SceneNode& node_by_id(const std::string& id) const;
    RigidTransform node_world_pose(const std::string& id) const;

    GaussianField field_;
    std::vector<SceneNode> nodes_;
    std::map<std::string, RigidTransform> initial_poses_;
    std::map<std::string, std::string> mesh_paths_;  // node id -> path
    std::vector<MountedCamera> cameras_;
    std::vector<MountedLidar> lidars_;
    double clock_ = 0.0;
};

}  // namespace gsim
