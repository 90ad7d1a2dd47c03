// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/scene.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "gsim/errors.hpp"
#include "gsim/log.hpp"
#include "gsim/splat_ply.hpp"

namespace gsim {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

RigidTransform parse_pose(const json& j, const std::string& context) {
    RigidTransform pose;
    if (j.contains("p")) {
        const auto p = j.at("p").get<std::vector<double>>();
        if (p.size() != 3) throw format_error(context + ": pose p must have 3 entries");
        pose.translation = {p[0], p[1], p[2]};
    }
    if (j.contains("q")) {
        const auto q = j.at("q").get<std::vector<double>>();
        if (q.size() != 4) throw format_error(context + ": pose q must have 4 entries");
        pose.rotation = Quat{q[0], q[1], q[2], q[3]}.normalized();
    }
    return pose;
}

std::string resolve(const fs::path& base, const std::string& rel) {
    const fs::path p(rel);
    return p.is_absolute() ? p.string() : (base / p).string();
}

}  // namespace

Scene Scene::load(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw io_error("cannot open scene manifest '" + manifest_path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw format_error("'" + manifest_path + "': " + e.what());
    }
    const fs::path base = fs::path(manifest_path).parent_path();

    Scene scene;
    if (!j.contains("nodes") || !j.at("nodes").is_array() || j.at("nodes").empty())
        throw validation_error("'" + manifest_path + "': manifest needs a nodes array");

    try {
        std::set<std::string> ids;
        for (const auto& nj : j.at("nodes")) {
            SceneNode node;
            node.id = nj.at("id").get<std::string>();
            if (!ids.insert(node.id).second)
                throw validation_error("'" + manifest_path + "': duplicate node id '" + node.id +
                                       "'");
            const std::string kind = nj.value("kind", std::string("interactive"));
            if (kind == "background")
                node.kind = NodeKind::background;
            else if (kind == "interactive")
                node.kind = NodeKind::interactive;
            else
                throw validation_error("'" + manifest_path + "': node '" + node.id +
                                       "' has unknown kind '" + kind + "'");
            if (nj.contains("pose")) {
                node.pose = parse_pose(nj.at("pose"), "node '" + node.id + "'");
                if (node.kind == NodeKind::background &&
                    (node.pose.translation.norm() > 0.0 ||
                     std::abs(node.pose.rotation.w - 1.0) > 1e-12))
                    throw validation_error("'" + manifest_path + "': background node '" +
                                           node.id + "' pose must be identity");
            }

            const std::string splat_path = resolve(base, nj.at("splat").get<std::string>());
            GaussianField part = load_splat_ply(splat_path);
            node.range.begin = scene.field_.size();
            node.range.end = node.range.begin + part.size();
            scene.field_.primitives.insert(scene.field_.primitives.end(),
                                           part.primitives.begin(), part.primitives.end());
            scene.field_.sh_degree = std::max(scene.field_.sh_degree, part.sh_degree);
            scene.field_.node_ranges[node.id] = node.range;

            if (nj.contains("mesh"))
                scene.mesh_paths_[node.id] = resolve(base, nj.at("mesh").get<std::string>());

            scene.initial_poses_[node.id] = node.pose;
            scene.nodes_.push_back(std::move(node));
        }
        validate_nodes(scene.field_, scene.nodes_);

        std::string background_id;
        for (const auto& node : scene.nodes_)
            if (node.kind == NodeKind::background) background_id = node.id;

        for (const auto& cj : j.value("cameras", json::array())) {
            MountedCamera cam;
            cam.model.id = cj.at("id").get<std::string>();
            cam.model.fx = cj.at("fx").get<double>();
            cam.model.fy = cj.at("fy").get<double>();
            cam.model.width = cj.at("width").get<int>();
            cam.model.height = cj.at("height").get<int>();
            cam.model.cx = cj.value("cx", cam.model.width * 0.5);
            cam.model.cy = cj.value("cy", cam.model.height * 0.5);
            cam.model.near = cj.value("near", 0.05);
            cam.model.far = cj.value("far", 100.0);
            cam.parent = cj.value("parent", background_id);
            if (cj.contains("mount"))
                cam.mount = parse_pose(cj.at("mount"), "camera '" + cam.model.id + "'");
            validate_camera(cam.model);
            scene.cameras_.push_back(std::move(cam));
        }
        for (const auto& lj : j.value("lidars", json::array())) {
            MountedLidar lidar;
            lidar.model.id = lj.at("id").get<std::string>();
            if (lj.contains("channels_deg")) {
                for (double deg : lj.at("channels_deg").get<std::vector<double>>())
                    lidar.model.channels.push_back(deg_to_rad(deg));
            } else if (lj.contains("channels")) {
                const auto& ch = lj.at("channels");
                const int count = ch.at("count").get<int>();
                const double lo = deg_to_rad(ch.at("min_deg").get<double>());
                const double hi = deg_to_rad(ch.at("max_deg").get<double>());
                for (int k = 0; k < count; ++k)
                    lidar.model.channels.push_back(
                        count > 1 ? lo + (hi - lo) * k / (count - 1) : 0.5 * (lo + hi));
            } else {
                throw validation_error("lidar '" + lidar.model.id +
                                       "' needs channels_deg or channels");
            }
            lidar.model.azimuth_step = deg_to_rad(lj.at("azimuth_step_deg").get<double>());
            lidar.model.max_range = lj.value("max_range", 100.0);
            lidar.model.alpha_threshold = lj.value("alpha_threshold", 0.5);
            lidar.parent = lj.value("parent", background_id);
            if (lj.contains("mount"))
                lidar.mount = parse_pose(lj.at("mount"), "lidar '" + lidar.model.id + "'");
            validate_lidar(lidar.model);
            scene.lidars_.push_back(std::move(lidar));
        }

        // Sensor parents must exist.
        for (const auto& cam : scene.cameras_) scene.node_by_id(cam.parent);
        for (const auto& lidar : scene.lidars_) scene.node_by_id(lidar.parent);
    } catch (const json::exception& e) {
        throw format_error("'" + manifest_path + "': " + e.what());
    }

    log_info("scene '" + manifest_path + "': " + std::to_string(scene.nodes_.size()) +
             " node(s), " + std::to_string(scene.field_.size()) + " primitives, " +
             std::to_string(scene.cameras_.size()) + " camera(s), " +
             std::to_string(scene.lidars_.size()) + " lidar(s)");
    return scene;
}

const SceneNode& Scene::node_by_id(const std::string& id) const {
    for (const auto& node : nodes_)
        if (node.id == id) return node;
    throw validation_error("unknown node '" + id + "'");
}

RigidTransform Scene::node_world_pose(const std::string& id) const {
    return node_by_id(id).pose;
}

void Scene::step_to(const PoseStream& stream, double t) {
    if (t < clock_)
        throw validation_error("step_to: time " + std::to_string(t) +
                               " is before scene clock " + std::to_string(clock_));
    for (const auto& id : stream.node_ids()) {
        const SceneNode& node = node_by_id(id);  // throws for unknown nodes
        if (node.kind == NodeKind::background)
            throw validation_error("pose stream drives background node '" + id + "'");
    }
    for (auto& node : nodes_) {
        if (node.kind == NodeKind::background) continue;
        node.pose = stream.sample(node.id, t, initial_poses_.at(node.id));
    }
    clock_ = t;
}

CameraModel Scene::camera(const std::string& id) const {
    for (const auto& cam : cameras_) {
        if (cam.model.id != id) continue;
        CameraModel out = cam.model;
        // Mounted world pose is parent ∘ mount (sensor -> world); the camera
        // model wants world -> camera.
        out.pose = (node_world_pose(cam.parent) * cam.mount).inverse();
        return out;
    }
    std::string known;
    for (const auto& cam : cameras_) known += (known.empty() ? "" : ", ") + cam.model.id;
    throw validation_error("unknown camera '" + id + "' (available: " +
                           (known.empty() ? "none" : known) + ")");
}

LidarModel Scene::lidar(const std::string& id) const {
    for (const auto& lidar : lidars_) {
        if (lidar.model.id != id) continue;
        LidarModel out = lidar.model;
        out.pose = node_world_pose(lidar.parent) * lidar.mount;
        return out;
    }
    std::string known;
    for (const auto& lidar : lidars_) known += (known.empty() ? "" : ", ") + lidar.model.id;
    throw validation_error("unknown lidar '" + id + "' (available: " +
                           (known.empty() ? "none" : known) + ")");
}

std::vector<std::string> Scene::camera_ids() const {
    std::vector<std::string> ids;
    for (const auto& cam : cameras_) ids.push_back(cam.model.id);
    return ids;
}

std::vector<std::string> Scene::lidar_ids() const {
    std::vector<std::string> ids;
    for (const auto& lidar : lidars_) ids.push_back(lidar.model.id);
    return ids;
}

std::vector<RenderTarget> Scene::render_all(const std::vector<CameraModel>& cameras,
                                            const RasterOptions& options) const {
    return render(field_, nodes_, cameras, options);
}

}  // namespace gsim
