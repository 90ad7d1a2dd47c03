// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/mesh.hpp"

#include <string>

#include "gsim/errors.hpp"

namespace gsim {

std::size_t drop_degenerate_faces(TriangleMesh& mesh) {
    std::size_t kept = 0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        if (mesh.face_area(f) > kDegenerateFaceArea) mesh.faces[kept++] = mesh.faces[f];
    }
    const std::size_t dropped = mesh.faces.size() - kept;
    mesh.faces.resize(kept);
    return dropped;
}

void validate_mesh(const TriangleMesh& mesh) {
    for (const auto& v : mesh.vertices)
        if (!v.finite()) throw validation_error("mesh has non-finite vertex");
    for (std::size_t f = 0; f < mesh.faces.size(); ++f)
        for (int k = 0; k < 3; ++k)
            if (mesh.faces[f][k] >= mesh.vertices.size())
                throw validation_error("face " + std::to_string(f) + " index " +
                                       std::to_string(mesh.faces[f][k]) +
                                       " out of range (vertex count " +
                                       std::to_string(mesh.vertices.size()) + ")");
    if (!mesh.colors.empty() && mesh.colors.size() != mesh.vertices.size())
        throw validation_error("color count does not match vertex count");
}

}  // namespace gsim
