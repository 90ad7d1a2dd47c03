// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "gsim/math.hpp"

namespace gsim {

// Pinhole camera. pose maps world to camera coordinates (x right, y down,
// z forward); pixel (ix, iy) samples at (ix + 0.5, iy + 0.5).
struct CameraModel {
    std::string id;
    double fx = 0.0, fy = 0.0;  // pixels
    double cx = 0.0, cy = 0.0;  // pixels
    int width = 0, height = 0;
    RigidTransform pose;  // world -> camera
    double near = 0.05, far = 100.0;  // meters

    Vec3 camera_center() const { return pose.inverse().translation; }

    // Unit world-space direction through the center of pixel (ix, iy).
    Vec3 pixel_ray_dir(int ix, int iy) const {
        const Vec3 dir_cam{(ix + 0.5 - cx) / fx, (iy + 0.5 - cy) / fy, 1.0};
        return pose.rotation.inverse_rotate(dir_cam).normalized();
    }

    // Looking from eye toward target, world up hint +z.
    static CameraModel look_at(const Vec3& eye, const Vec3& target, double fx, double fy,
                               int width, int height, const Vec3& up = {0, 0, 1});
};

// Throws validation_error on bad intrinsics (fx,fy > 0, 0 < near < far,
// width,height >= 16).
void validate_camera(const CameraModel& cam);

}  // namespace gsim
