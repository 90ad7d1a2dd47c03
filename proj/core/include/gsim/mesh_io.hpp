// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

#include "gsim/mesh.hpp"

namespace gsim {

struct MeshLoadStats {
    std::size_t degenerate_faces_dropped = 0;
    std::size_t duplicate_vertices_merged = 0;
};

// Loads an ASCII OBJ (v/f records; normals, UVs and materials ignored) or a
// binary STL (80-byte header + uint32 count + 50-byte records). STL vertices
// are deduplicated by exact hashing of coordinates quantized at 1e-7 m.
// Degenerate faces are dropped. Unknown extension -> validation_error.
TriangleMesh load_mesh(const std::string& path, MeshLoadStats* stats = nullptr);

// Writes by extension: .obj (with per-vertex colors when present) or binary .stl.
void save_mesh(const TriangleMesh& mesh, const std::string& path);

}  // namespace gsim
