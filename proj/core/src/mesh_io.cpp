// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/mesh_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "gsim/errors.hpp"
#include "gsim/log.hpp"

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

// OBJ face corner like "7", "7/2", "7//3", "7/2/3"; we only keep the vertex index.
long parse_face_index(const std::string& token) {
    const auto slash = token.find('/');
    const std::string head = slash == std::string::npos ? token : token.substr(0, slash);
    return std::stol(head);
}

TriangleMesh load_obj(const std::string& path, MeshLoadStats& stats) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open OBJ '" + path + "'");

    TriangleMesh mesh;
    bool any_color = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw format_error("'" + path + "': bad vertex at line " +
                                   std::to_string(line_no));
            mesh.vertices.push_back({x, y, z});
            double r, g, b;
            if (ls >> r >> g >> b) {
                mesh.colors.resize(mesh.vertices.size(), Vec3{0.5, 0.5, 0.5});
                mesh.colors.back() = {r, g, b};
                any_color = true;
            } else if (any_color) {
                mesh.colors.resize(mesh.vertices.size(), Vec3{0.5, 0.5, 0.5});
            }
        } else if (tag == "f") {
            std::vector<std::uint32_t> corners;
            std::string token;
            while (ls >> token) {
                long idx = parse_face_index(token);
                if (idx < 0) idx = static_cast<long>(mesh.vertices.size()) + idx + 1;
                if (idx < 1 || idx > static_cast<long>(mesh.vertices.size()))
                    throw validation_error("'" + path + "': face index " + token +
                                           " out of range at line " + std::to_string(line_no));
                corners.push_back(static_cast<std::uint32_t>(idx - 1));
            }
            if (corners.size() < 3)
                throw format_error("'" + path + "': face with <3 corners at line " +
                                   std::to_string(line_no));
            for (std::size_t k = 1; k + 1 < corners.size(); ++k)
                mesh.faces.push_back({corners[0], corners[k], corners[k + 1]});
        }
        // vn/vt/usemtl/etc. ignored
    }
    if (!mesh.colors.empty() && mesh.colors.size() != mesh.vertices.size())
        mesh.colors.resize(mesh.vertices.size(), Vec3{0.5, 0.5, 0.5});
    stats.degenerate_faces_dropped = drop_degenerate_faces(mesh);
    return mesh;
}

struct QuantKey {
    std::int64_t x, y, z;
    bool operator==(const QuantKey& o) const { return x == o.x && y == o.y && z == o.z; }
};
struct QuantKeyHash {
    std::size_t operator()(const QuantKey& k) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t v : {k.x, k.y, k.z}) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

constexpr double kStlWeldTolerance = 1e-7;  // m

TriangleMesh load_stl(const std::string& path, MeshLoadStats& stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open STL '" + path + "'");
    in.seekg(0, std::ios::end);
    const std::int64_t file_size = in.tellg();
    in.seekg(0, std::ios::beg);
    if (file_size < 84) throw format_error("'" + path + "': too short for binary STL");

    char header[80];
    in.read(header, 80);
    std::uint32_t tri_count = 0;
    in.read(reinterpret_cast<char*>(&tri_count), 4);
    if (file_size != 84 + static_cast<std::int64_t>(tri_count) * 50)
        throw format_error("'" + path + "': size does not match binary STL record count");

    TriangleMesh mesh;
    std::unordered_map<QuantKey, std::uint32_t, QuantKeyHash> weld;
    std::size_t raw_vertices = 0;
    for (std::uint32_t t = 0; t < tri_count; ++t) {
        float rec[12];
        std::uint16_t attr;
        in.read(reinterpret_cast<char*>(rec), 48);
        in.read(reinterpret_cast<char*>(&attr), 2);
        if (!in) throw format_error("'" + path + "': truncated record " + std::to_string(t));
        std::array<std::uint32_t, 3> face{};
        for (int c = 0; c < 3; ++c) {
            const Vec3 v{rec[3 + c * 3], rec[4 + c * 3], rec[5 + c * 3]};
            if (!v.finite())
                throw validation_error("'" + path + "': non-finite vertex in record " +
                                       std::to_string(t));
            ++raw_vertices;
            const QuantKey key{std::llround(v.x / kStlWeldTolerance),
                               std::llround(v.y / kStlWeldTolerance),
                               std::llround(v.z / kStlWeldTolerance)};
            auto [it, inserted] =
                weld.emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
            if (inserted) mesh.vertices.push_back(v);
            face[c] = it->second;
        }
        mesh.faces.push_back(face);
    }
    stats.duplicate_vertices_merged = raw_vertices - mesh.vertices.size();
    stats.degenerate_faces_dropped = drop_degenerate_faces(mesh);
    return mesh;
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    char buf[256];
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& v = mesh.vertices[i];
        if (mesh.has_colors()) {
            const Vec3& c = mesh.colors[i];
            std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g %.9g %.9g %.9g\n", v.x, v.y,
                          v.z, c.x, c.y, c.z);
        } else {
            std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
        }
        out << buf;
    }
    for (const auto& f : mesh.faces)
        out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    if (!out) throw io_error("write failed for '" + path + "'");
}

void save_stl(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    char header[80] = {};
    std::strncpy(header, "gsim binary stl", sizeof(header) - 1);
    out.write(header, 80);
    const std::uint32_t n = static_cast<std::uint32_t>(mesh.faces.size());
    out.write(reinterpret_cast<const char*>(&n), 4);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Vec3 nrm = mesh.face_normal(f);
        float rec[12] = {static_cast<float>(nrm.x), static_cast<float>(nrm.y),
                         static_cast<float>(nrm.z)};
        for (int c = 0; c < 3; ++c) {
            const Vec3& v = mesh.vertices[mesh.faces[f][c]];
            rec[3 + c * 3] = static_cast<float>(v.x);
            rec[4 + c * 3] = static_cast<float>(v.y);
            rec[5 + c * 3] = static_cast<float>(v.z);
        }
        const std::uint16_t attr = 0;
        out.write(reinterpret_cast<const char*>(rec), 48);
        out.write(reinterpret_cast<const char*>(&attr), 2);
    }
    if (!out) throw io_error("write failed for '" + path + "'");
}

}  // namespace

TriangleMesh load_mesh(const std::string& path, MeshLoadStats* stats) {
    MeshLoadStats local;
    MeshLoadStats& s = stats ? *stats : local;
    const std::string ext = lower_extension(path);
    TriangleMesh mesh;
    if (ext == "obj") {
        mesh = load_obj(path, s);
    } else if (ext == "stl") {
        mesh = load_stl(path, s);
    } else {
        throw validation_error("unknown mesh extension '." + ext + "' for '" + path + "'");
    }
    validate_mesh(mesh);
    if (s.degenerate_faces_dropped > 0)
        log_warn("'" + path + "': dropped " + std::to_string(s.degenerate_faces_dropped) +
                 " degenerate face(s)");
    log_info("'" + path + "': " + std::to_string(mesh.vertices.size()) + " vertices, " +
             std::to_string(mesh.faces.size()) + " faces");
    return mesh;
}

void save_mesh(const TriangleMesh& mesh, const std::string& path) {
    validate_mesh(mesh);
    const std::string ext = lower_extension(path);
    if (ext == "obj") {
        save_obj(mesh, path);
    } else if (ext == "stl") {
        save_stl(mesh, path);
    } else {
        throw validation_error("unknown mesh extension '." + ext + "' for '" + path + "'");
    }
}

}  // namespace gsim
