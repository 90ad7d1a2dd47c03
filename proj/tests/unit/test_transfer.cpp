// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <fstream>

#include "gsim/errors.hpp"
#include "gsim/transfer.hpp"
#include "test_oracles.hpp"

using namespace gsim;

TEST_CASE("equilateral triangle converts to a symmetric facet primitive") {
    TriangleMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}};
    mesh.faces = {{0, 1, 2}};
    const GaussianField field = mesh_to_gaussians(mesh);
    REQUIRE(field.size() == 1);
    const auto& p = field.primitives[0];
    CHECK(p.mean.x == doctest::Approx(0.5));
    CHECK(p.mean.y == doctest::Approx(std::sqrt(3.0) / 6.0));
    CHECK(p.mean.z == doctest::Approx(0.0));
    // barycenter-to-vertex distance is 1/sqrt(3) for all three corners
    CHECK(p.scale.x == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));
    CHECK(p.scale.y == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));
    CHECK(p.scale.z == doctest::Approx(kFlattenEpsilon / std::sqrt(3.0)).epsilon(1e-9));
    // normal axis (local z) along +-z
    const Vec3 axis = p.rotation.rotate({0, 0, 1});
    CHECK(std::abs(std::abs(axis.z) - 1.0) < 1e-9);
    CHECK(p.opacity == doctest::Approx(kFacetOpacity));
}

TEST_CASE("12-face cube: one primitive per facet, axis-aligned normals, flattened") {
    const TriangleMesh cube = oracle::subdivided_cube(1.0, 1);
    REQUIRE(cube.faces.size() == 12);
    const GaussianField field = mesh_to_gaussians(cube);
    REQUIRE(field.size() == 12);
    for (std::size_t f = 0; f < field.size(); ++f) {
        const auto& p = field.primitives[f];
        const Vec3 expect = cube.face_barycenter(f);
        CHECK(p.mean.x == expect.x);  // same arithmetic, exact
        CHECK(p.mean.y == expect.y);
        CHECK(p.mean.z == expect.z);
        const Vec3 axis = p.rotation.rotate({0, 0, 1});
        const double largest =
            std::max({std::abs(axis.x), std::abs(axis.y), std::abs(axis.z)});
        CHECK(largest == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(p.scale.z == doctest::Approx(kFlattenEpsilon * p.scale.x).epsilon(1e-12));
    }
}

TEST_CASE("mid-gray vertex colors map to zero SH dc") {
    TriangleMesh mesh;
    mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    mesh.colors = {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}};
    mesh.faces = {{0, 1, 2}};
    const GaussianField field = mesh_to_gaussians(mesh);
    CHECK(field.primitives[0].sh_at(0, 0) == doctest::Approx(0.0));
    CHECK(field.primitives[0].sh_at(1, 0) == doctest::Approx(0.0));
    CHECK(field.primitives[0].sh_at(2, 0) == doctest::Approx(0.0));
}

TEST_CASE("facet normal-axis parallelism property over an icosphere") {
    const TriangleMesh sphere = oracle::icosphere(0.5, 2);
    const GaussianField field = mesh_to_gaussians(sphere);
    REQUIRE(field.size() == sphere.faces.size());
    for (std::size_t f = 0; f < field.size(); ++f) {
        const Vec3 normal = sphere.face_normal(f);
        const Vec3 axis = field.primitives[f].rotation.rotate({0, 0, 1});
        const double angle = std::acos(std::clamp(std::abs(normal.dot(axis)), -1.0, 1.0));
        CHECK(angle < 1e-6);
        // shortest scale axis is the local z
        CHECK(field.primitives[f].scale.z < field.primitives[f].scale.x);
        // means equal barycenters exactly
        const Vec3 bc = sphere.face_barycenter(f);
        CHECK(field.primitives[f].mean.x == bc.x);
        CHECK(field.primitives[f].mean.y == bc.y);
        CHECK(field.primitives[f].mean.z == bc.z);
    }
}

TEST_CASE("empty mesh converts to an empty field") {
    CHECK(mesh_to_gaussians(TriangleMesh{}).empty());
}

TEST_CASE("depth ring constructs 3 rings of cameras aimed at the bbox center") {
    const GaussianField field = mesh_to_gaussians(oracle::icosphere(0.5, 2));
    const auto views = render_depth_ring(field, 8, 3.0, 64);
    CHECK(views.size() == 24);
    for (const auto& view : views) {
        // optical axis passes through the origin (bbox center) within 1e-6
        const Vec3 center_cam = view.camera.pose.transform_point({0, 0, 0});
        CHECK(std::abs(center_cam.x) < 1e-6);
        CHECK(std::abs(center_cam.y) < 1e-6);
        CHECK(center_cam.z == doctest::Approx(3.0).epsilon(1e-6));
    }
}

TEST_CASE("depth ring center pixel sees the near sphere surface") {
    const double radius = 0.5;
    const GaussianField shell = oracle::sphere_shell_field(radius, 2000, 0.04);
    const double cam_distance = 2.0;
    const auto views = render_depth_ring(shell, 8, cam_distance, 128);
    int checked = 0;
    for (const auto& view : views) {
        const float d = view.depth.at(64, 64);
        if (d <= 0.0f) continue;  // invalid pixel
        CHECK(d == doctest::Approx(cam_distance - radius).epsilon(0.05));
        ++checked;
    }
    CHECK(checked > 20);
}

TEST_CASE("depth ring rejects tiny view counts and degenerate fields") {
    const GaussianField field = mesh_to_gaussians(oracle::icosphere(0.5, 1));
    CHECK_THROWS_AS(render_depth_ring(field, 4, 3.0, 64), validation_error);
    GaussianField empty;
    CHECK_THROWS_AS(render_depth_ring(empty, 8, 3.0, 64), validation_error);
}

TEST_CASE("tsdf_fuse of a frontal plane crosses zero at the plane depth") {
    // Plane at z = 2 in front of a camera at the origin looking +z.
    CameraModel cam;
    cam.fx = cam.fy = 64.0;
    cam.cx = cam.cy = 32.0;
    cam.width = cam.height = 64;
    cam.near = 0.05;
    cam.far = 10.0;
    Image1 depth(64, 64, 2.0f);

    const double voxel = 0.05;
    TsdfVolume volume = TsdfVolume::create({-0.4, -0.4, 1.0}, voxel, {16, 16, 40}, 3 * voxel);
    tsdf_fuse(volume, cam, depth);

    // Walk a z-column through the volume center and find the sign change.
    const int cx = 8, cy = 8;
    double crossing = -1.0;
    for (int z = 0; z + 1 < volume.dims[2]; ++z) {
        const double a = volume.tsdf[volume.index(cx, cy, z)];
        const double b = volume.tsdf[volume.index(cx, cy, z + 1)];
        const double wa = volume.weights[volume.index(cx, cy, z)];
        const double wb = volume.weights[volume.index(cx, cy, z + 1)];
        if (wa > 0 && wb > 0 && a > 0 && b <= 0) {
            const double za = volume.voxel_center(cx, cy, z).z;
            crossing = za + voxel * a / (a - b);
            break;
        }
    }
    REQUIRE(crossing > 0.0);
    CHECK(crossing == doctest::Approx(2.0).epsilon(voxel));
}

TEST_CASE("fusing the same view twice doubles weights and keeps tsdf") {
    CameraModel cam;
    cam.fx = cam.fy = 32.0;
    cam.cx = cam.cy = 16.0;
    cam.width = cam.height = 32;
    Image1 depth(32, 32, 1.5f);
    const double voxel = 0.1;
    TsdfVolume once = TsdfVolume::create({-0.5, -0.5, 0.5}, voxel, {10, 10, 20}, 3 * voxel);
    tsdf_fuse(once, cam, depth);
    TsdfVolume twice = once;
    tsdf_fuse(twice, cam, depth);
    for (std::size_t i = 0; i < once.tsdf.size(); ++i) {
        CHECK(twice.tsdf[i] == doctest::Approx(once.tsdf[i]).epsilon(1e-12));
        CHECK(twice.weights[i] == doctest::Approx(2.0 * once.weights[i]).epsilon(1e-12));
    }
}

TEST_CASE("voxels far behind the surface stay untouched") {
    CameraModel cam;
    cam.fx = cam.fy = 32.0;
    cam.cx = cam.cy = 16.0;
    cam.width = cam.height = 32;
    Image1 depth(32, 32, 1.0f);
    const double voxel = 0.1;
    TsdfVolume volume = TsdfVolume::create({-0.2, -0.2, 2.0}, voxel, {4, 4, 4}, 3 * voxel);
    tsdf_fuse(volume, cam, depth);  // all voxels >= 1 m behind the measured surface
    for (double w : volume.weights) CHECK(w == 0.0);
}

TEST_CASE("fusion order independence within 1e-6") {
    const GaussianField shell = oracle::sphere_shell_field(0.5, 1500, 0.05);
    const auto views = render_depth_ring(shell, 8, 2.5, 96);
    const double voxel = 0.05;
    auto make = [&]() {
        return TsdfVolume::create({-0.8, -0.8, -0.8}, voxel, {32, 32, 32}, 3 * voxel);
    };
    TsdfVolume forward = make(), backward = make();
    for (const auto& view : views) tsdf_fuse(forward, view.camera, view.depth);
    for (auto it = views.rbegin(); it != views.rend(); ++it)
        tsdf_fuse(backward, it->camera, it->depth);
    for (std::size_t i = 0; i < forward.tsdf.size(); ++i) {
        CHECK(std::abs(forward.tsdf[i] - backward.tsdf[i]) < 1e-6);
        CHECK(forward.weights[i] == backward.weights[i]);
    }
}

TEST_CASE("marching cubes on an analytic sphere SDF") {
    const double radius = 0.5;
    const double voxel = 1.0 / 48.0;
    const int n = 64;
    TsdfVolume volume = TsdfVolume::create({-n / 2.0 * voxel, -n / 2.0 * voxel,
                                            -n / 2.0 * voxel},
                                           voxel, {n, n, n}, 3 * voxel);
    for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                const std::size_t i = volume.index(x, y, z);
                volume.tsdf[i] = volume.voxel_center(x, y, z).norm() - radius;
                volume.weights[i] = 1.0;
            }
    const TriangleMesh mesh = extract_mesh(volume);
    REQUIRE(!mesh.faces.empty());
    CHECK(oracle::audit_edges(mesh).watertight());
    for (const auto& v : mesh.vertices)
        CHECK(std::abs(v.norm() - radius) < voxel);
    // outward orientation: positive enclosed volume near (4/3) pi r^3
    const double vol = oracle::signed_volume(mesh);
    CHECK(vol == doctest::Approx(4.0 / 3.0 * kPi * radius * radius * radius).epsilon(0.05));
}

TEST_CASE("all-positive volume has no surface") {
    TsdfVolume volume = TsdfVolume::create({0, 0, 0}, 0.1, {8, 8, 8}, 0.3);
    for (auto& w : volume.weights) w = 1.0;
    CHECK(extract_mesh(volume).faces.empty());
}

TEST_CASE("decimate is a no-op when the target exceeds the face count") {
    const TriangleMesh sphere = oracle::icosphere(0.5, 2);
    const TriangleMesh out = decimate(sphere, sphere.faces.size() + 10);
    CHECK(out.faces.size() == sphere.faces.size());
}

TEST_CASE("decimate rejects targets below a tetrahedron") {
    CHECK_THROWS_AS(decimate(oracle::icosphere(0.5, 1), 3), validation_error);
}

TEST_CASE("decimated sphere stays near the original and watertight") {
    const TriangleMesh sphere = oracle::icosphere(0.5, 3);  // 1280 faces
    const TriangleMesh out = decimate(sphere, 300);
    CHECK(out.faces.size() <= 300);
    CHECK(out.faces.size() > 100);
    CHECK(oracle::audit_edges(out).watertight());
    const double voxel = 1.0 / 64.0;
    CHECK(oracle::symmetric_hausdorff(sphere, out) < 5 * voxel);

    // face count never increases across successive targets
    const TriangleMesh finer = decimate(sphere, 600);
    CHECK(finer.faces.size() <= 600);
    CHECK(finer.faces.size() >= out.faces.size());
}

TEST_CASE("gaussians_to_mesh roundtrips an icosphere") {
    const TriangleMesh sphere = oracle::icosphere(0.5, 2);  // 320 faces
    const GaussianField field = mesh_to_gaussians(sphere);
    const double voxel = 1.0 / 48.0;
    const TriangleMesh out = gaussians_to_mesh(field, voxel, 2000);
    REQUIRE(!out.faces.empty());
    CHECK(oracle::symmetric_hausdorff(sphere, out) <= 3 * voxel);
}

TEST_CASE("tsdf raw dump carries the grids verbatim") {
    const GaussianField field = mesh_to_gaussians(oracle::icosphere(0.3, 2));
    TsdfVolume volume;
    const TriangleMesh out = gaussians_to_mesh(field, 0.02, 2000, &volume);
    REQUIRE(!out.faces.empty());
    REQUIRE(volume.voxel_count() > 0);

    const std::string path = oracle::temp_dir("tsdf") + "/vol.raw";
    volume.save_raw(path);

    std::ifstream in(path, std::ios::binary);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    CHECK(magic == "gsim_tsdf");
    std::string tag;
    int dx = 0, dy = 0, dz = 0;
    in >> tag >> dx >> dy >> dz;
    CHECK(tag == "dims");
    CHECK(dx == volume.dims[0]);
    CHECK(dy == volume.dims[1]);
    CHECK(dz == volume.dims[2]);
    double voxel = 0.0;
    in >> tag >> voxel;
    CHECK(voxel == volume.voxel_size);
    std::string line;
    while (std::getline(in, line) && line != "end") {
    }
    std::vector<float> tsdf(volume.voxel_count());
    in.read(reinterpret_cast<char*>(tsdf.data()),
            static_cast<std::streamsize>(tsdf.size() * sizeof(float)));
    REQUIRE(in.good());
    for (std::size_t i = 0; i < tsdf.size(); i += 997)
        CHECK(tsdf[i] == static_cast<float>(volume.tsdf[i]));
}

TEST_CASE("a primitive smaller than a voxel does not crash") {
    GaussianField field;
    field.sh_degree = 0;
    GaussianPrimitive p;
    p.mean = {0.2, 0.1, 0.05};
    p.scale = {0.001, 0.001, 0.00001};
    p.opacity = 0.9;
    field.primitives.push_back(p);
    const TriangleMesh out = gaussians_to_mesh(field, 0.01, 100);
    CHECK(out.faces.size() <= 200);  // empty or a tiny blob
}
