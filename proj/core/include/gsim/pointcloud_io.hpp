// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "gsim/trace.hpp"

namespace gsim {

// PLY with properties x y z (float), ring (int), azimuth (float).
void save_pointcloud_ply(const PointCloud& cloud, const std::string& path, bool ascii = false);

// PCD v0.7, FIELDS x y z ring azimuth, ascii or binary DATA.
void save_pointcloud_pcd(const PointCloud& cloud, const std::string& path, bool ascii = true);

// Dispatch on extension (.ply binary, .pcd ascii by default).
void save_pointcloud(const PointCloud& cloud, const std::string& path, bool ascii = false);

}  // namespace gsim
