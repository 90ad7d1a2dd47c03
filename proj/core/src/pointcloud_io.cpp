// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/pointcloud_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gsim/errors.hpp"

namespace gsim {

namespace {

std::string lower_extension(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return ext;
}

struct PackedPoint {
    float x, y, z;
    std::int32_t ring;
    float azimuth;
};
static_assert(sizeof(PackedPoint) == 20);

PackedPoint pack(const PointCloud& cloud, std::size_t i) {
    return {static_cast<float>(cloud.points[i].x), static_cast<float>(cloud.points[i].y),
            static_cast<float>(cloud.points[i].z), static_cast<std::int32_t>(cloud.ring[i]),
            static_cast<float>(cloud.azimuth[i])};
}

}  // namespace

void save_pointcloud_ply(const PointCloud& cloud, const std::string& path, bool ascii) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << "ply\n"
        << (ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
        << "element vertex " << cloud.size() << "\n"
        << "property float x\nproperty float y\nproperty float z\n"
        << "property int ring\nproperty float azimuth\n"
        << "end_header\n";
    char buf[160];
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const PackedPoint p = pack(cloud, i);
        if (ascii) {
            std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %d %.9g\n", p.x, p.y, p.z,
                          p.ring, p.azimuth);
            out << buf;
        } else {
            out.write(reinterpret_cast<const char*>(&p), sizeof(PackedPoint));
        }
    }
    if (!out) throw io_error("write failed for '" + path + "'");
}

void save_pointcloud_pcd(const PointCloud& cloud, const std::string& path, bool ascii) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << "# .PCD v0.7 - Point Cloud Data file format\n"
        << "VERSION 0.7\n"
        << "FIELDS x y z ring azimuth\n"
        << "SIZE 4 4 4 4 4\n"
        << "TYPE F F F I F\n"
        << "COUNT 1 1 1 1 1\n"
        << "WIDTH " << cloud.size() << "\n"
        << "HEIGHT 1\n"
        << "VIEWPOINT 0 0 0 1 0 0 0\n"
        << "POINTS " << cloud.size() << "\n"
        << "DATA " << (ascii ? "ascii" : "binary") << "\n";
    char buf[160];
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const PackedPoint p = pack(cloud, i);
        if (ascii) {
            std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %d %.9g\n", p.x, p.y, p.z,
                          p.ring, p.azimuth);
            out << buf;
        } else {
            out.write(reinterpret_cast<const char*>(&p), sizeof(PackedPoint));
        }
    }
    if (!out) throw io_error("write failed for '" + path + "'");
}

void save_pointcloud(const PointCloud& cloud, const std::string& path, bool ascii) {
    const std::string ext = lower_extension(path);
    if (ext == "ply")
        save_pointcloud_ply(cloud, path, ascii);
    else if (ext == "pcd")
        save_pointcloud_pcd(cloud, path, ascii);
    else
        throw validation_error("unknown point cloud extension '." + ext + "' for '" + path +
                               "'");
}

}  // namespace gsim
