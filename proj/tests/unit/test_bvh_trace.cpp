// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "gsim/errors.hpp"
#include "gsim/trace.hpp"
#include "test_oracles.hpp"

using namespace gsim;

namespace {

GaussianField single_primitive(const Vec3& mean, double scale, double opacity) {
    GaussianField field;
    field.sh_degree = 0;
    GaussianPrimitive p;
    p.mean = mean;
    p.scale = {scale, scale, scale};
    p.opacity = opacity;
    field.primitives.push_back(p);
    return field;
}

}  // namespace

TEST_CASE("single isotropic primitive gives a [-3s, 3s]^3 root box") {
    const double s = 0.2;
    const auto bvh = GaussianBvh::build(single_primitive({0, 0, 0}, s, 0.9), {});
    const Aabb& root = bvh.tree().root_bounds();
    CHECK(root.lo.x == doctest::Approx(-3 * s).epsilon(1e-9));
    CHECK(root.hi.y == doctest::Approx(3 * s).epsilon(1e-9));
    CHECK(root.hi.z == doctest::Approx(3 * s).epsilon(1e-9));
}

TEST_CASE("two far-apart primitives split into disjoint children") {
    GaussianField field = single_primitive({-10, 0, 0}, 0.1, 0.9);
    field.primitives.push_back(field.primitives[0]);
    field.primitives[1].mean = {10, 0, 0};
    // leaf capacity is 4, force a split with a few more primitives per side
    for (int k = 0; k < 4; ++k) {
        GaussianPrimitive p = field.primitives[0];
        p.mean.x += 0.05 * (k + 1);
        field.primitives.push_back(p);
        GaussianPrimitive q = field.primitives[1];
        q.mean.x += 0.05 * (k + 1);
        field.primitives.push_back(q);
    }
    const auto bvh = GaussianBvh::build(field, {});
    const auto& nodes = bvh.tree().nodes();
    REQUIRE(!nodes.front().is_leaf());
    const Aabb& left = nodes[nodes.front().left].box;
    const Aabb& right = nodes[nodes.front().right].box;
    const bool disjoint_x = left.hi.x < right.lo.x || right.hi.x < left.lo.x;
    CHECK(disjoint_x);
}

TEST_CASE("every primitive appears in exactly one leaf") {
    const GaussianField field = oracle::random_field(55, 1000, 10.0, 0.01, 0.4, 0);
    const auto bvh = GaussianBvh::build(field, {});
    const auto& tree = bvh.tree();
    std::vector<int> seen(field.size(), 0);
    for (const auto& node : tree.nodes()) {
        if (!node.is_leaf()) continue;
        CHECK(node.count <= Bvh::kLeafCapacity);
        for (std::uint32_t k = 0; k < node.count; ++k) ++seen[tree.prim_order()[node.first + k]];
    }
    for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == 1);
}

TEST_CASE("leaf boxes contain their primitives and parents contain children") {
    const GaussianField field = oracle::random_field(56, 500, 5.0, 0.01, 0.4, 0);
    const auto bvh = GaussianBvh::build(field, {});
    const auto& tree = bvh.tree();
    for (const auto& node : tree.nodes()) {
        if (node.is_leaf()) {
            for (std::uint32_t k = 0; k < node.count; ++k)
                CHECK(node.box.contains(
                    bvh.primitives()[tree.prim_order()[node.first + k]].bounds));
        } else {
            CHECK(node.box.contains(tree.nodes()[node.left].box));
            CHECK(node.box.contains(tree.nodes()[node.right].box));
        }
    }
}

TEST_CASE("ray through the mean peaks at the mean with response = opacity") {
    const auto posed = pose_primitive(
        single_primitive({0, 0, 4}, 0.3, 0.8).primitives[0], RigidTransform::identity());
    Ray ray{{0, 0, 0}, {0, 0, 1}, 100.0};
    const RayPeak peak = ray_gaussian_peak(ray, posed);
    CHECK(peak.t == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(peak.response == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("perpendicular miss attenuates by exp(-r^2 / 2s^2)") {
    const double s = 0.5, r = 0.7, opacity = 0.9;
    const auto posed = pose_primitive(
        single_primitive({r, 0, 5}, s, opacity).primitives[0], RigidTransform::identity());
    Ray ray{{0, 0, 0}, {0, 0, 1}, 100.0};
    const RayPeak peak = ray_gaussian_peak(ray, posed);
    CHECK(peak.t == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(peak.response ==
          doctest::Approx(opacity * std::exp(-r * r / (2 * s * s))).epsilon(1e-9));
}

TEST_CASE("mean behind the origin clamps t_peak to 0") {
    const auto posed = pose_primitive(
        single_primitive({0, 0, -2}, 0.3, 0.8).primitives[0], RigidTransform::identity());
    Ray ray{{0, 0, 0}, {0, 0, 1}, 100.0};
    CHECK(ray_gaussian_peak(ray, posed).t == 0.0);
}

TEST_CASE("empty scene misses") {
    GaussianField field;
    field.sh_degree = 0;
    const auto bvh = GaussianBvh::build(field, {});
    const TraceResult result = bvh.trace({{0, 0, 0}, {0, 0, 1}, 100.0});
    CHECK(!result.hit);
    CHECK(result.accum_alpha == 0.0);
}

TEST_CASE("single near-opaque primitive hits at its distance, renormalized") {
    const auto bvh = GaussianBvh::build(single_primitive({0, 0, 4}, 0.2, 0.95), {});
    const TraceResult result = bvh.trace({{0, 0, 0}, {0, 0, 1}, 100.0}, 0.5);
    REQUIRE(result.hit);
    CHECK(result.depth == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("BVH trace equals linear-scan trace exactly on random rays") {
    const GaussianField field = oracle::random_field(57, 800, 6.0, 0.02, 0.4, 0);
    const auto bvh = GaussianBvh::build(field, {});
    std::mt19937_64 rng(58);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int hits = 0;
    for (int k = 0; k < 2000; ++k) {
        Vec3 dir{u(rng), u(rng), u(rng)};
        while (dir.norm() < 1e-3) dir = {u(rng), u(rng), u(rng)};
        const Ray ray{{4.0 * u(rng), 4.0 * u(rng), 4.0 * u(rng)}, dir.normalized(), 50.0};
        const TraceResult a = bvh.trace(ray, 0.5);
        const TraceResult b = bvh.trace_linear(ray, 0.5);
        CHECK(a.hit == b.hit);
        CHECK(a.depth == b.depth);              // bit-identical
        CHECK(a.accum_alpha == b.accum_alpha);  // bit-identical
        hits += a.hit ? 1 : 0;
    }
    CHECK(hits > 0);  // the comparison must exercise real hits
}

TEST_CASE("scan inside a dense gaussian sphere returns ranges near the radius") {
    const double radius = 3.0;
    const GaussianField shell = oracle::sphere_shell_field(radius, 4000, 0.12);
    const auto bvh = GaussianBvh::build(shell, {});

    LidarModel lidar;
    lidar.id = "test";
    for (int e = -2; e <= 2; ++e) lidar.channels.push_back(deg_to_rad(10.0 * e));
    lidar.azimuth_step = deg_to_rad(2.0);
    lidar.max_range = 10.0;
    lidar.alpha_threshold = 0.5;

    const PointCloud cloud = bvh.scan(lidar);
    const std::size_t rays = lidar.channels.size() * lidar_azimuth_count(lidar);
    CHECK(lidar_azimuth_count(lidar) == 180);
    CHECK(cloud.size() > rays * 9 / 10);  // nearly all rays return
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK(cloud.points[i].norm() <= lidar.max_range);
        CHECK(std::abs(cloud.points[i].norm() - radius) < 3.0 * 0.12);
    }
}

TEST_CASE("scan output is channel-major with ascending azimuth and deterministic") {
    const GaussianField shell = oracle::sphere_shell_field(2.0, 1500, 0.1);
    const auto bvh = GaussianBvh::build(shell, {});
    LidarModel lidar;
    lidar.id = "order";
    lidar.channels = {deg_to_rad(-5.0), 0.0, deg_to_rad(5.0)};
    lidar.azimuth_step = deg_to_rad(5.0);
    lidar.max_range = 10.0;

    const PointCloud a = bvh.scan(lidar);
    const PointCloud b = bvh.scan(lidar);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.points[i].x == b.points[i].x);
        CHECK(a.ring[i] == b.ring[i]);
        CHECK(a.azimuth[i] == b.azimuth[i]);
    }
    for (std::size_t i = 1; i < a.size(); ++i) {
        const bool ordered = a.ring[i] > a.ring[i - 1] ||
                             (a.ring[i] == a.ring[i - 1] && a.azimuth[i] > a.azimuth[i - 1]);
        CHECK(ordered);
    }
}

TEST_CASE("empty scene scans to an empty cloud") {
    GaussianField field;
    field.sh_degree = 0;
    const auto bvh = GaussianBvh::build(field, {});
    LidarModel lidar;
    lidar.id = "empty";
    lidar.channels = {0.0};
    lidar.azimuth_step = deg_to_rad(10.0);
    lidar.max_range = 5.0;
    CHECK(bvh.scan(lidar).size() == 0);
}

TEST_CASE("increasing alpha_threshold never converts a miss into a hit") {
    const GaussianField field = oracle::random_field(59, 300, 4.0, 0.02, 0.3, 0);
    const auto bvh = GaussianBvh::build(field, {});
    std::mt19937_64 rng(60);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        Vec3 dir{u(rng), u(rng), u(rng)};
        while (dir.norm() < 1e-3) dir = {u(rng), u(rng), u(rng)};
        const Ray ray{{3.0 * u(rng), 3.0 * u(rng), 3.0 * u(rng)}, dir.normalized(), 50.0};
        bool was_hit = true;
        for (double threshold : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const bool hit = bvh.trace(ray, threshold).hit;
            if (!was_hit) CHECK(!hit);
            was_hit = hit;
        }
    }
}

TEST_CASE("lidar validation rejects a non-dividing azimuth step") {
    LidarModel lidar;
    lidar.id = "bad";
    lidar.channels = {0.0};
    lidar.azimuth_step = 1.0;  // 2*pi / 1.0 is not an integer
    lidar.max_range = 5.0;
    CHECK_THROWS_AS(validate_lidar(lidar), validation_error);
}
