// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "gsim/transfer.hpp"

namespace {

// Unit icosphere mesh built once for conversion benchmarks.
gsim::TriangleMesh icosphere_mesh() {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<gsim::Vec3> verts = {{-1, t, 0}, {1, t, 0},   {-1, -t, 0}, {1, -t, 0},
                                     {0, -1, t}, {0, 1, t},   {0, -1, -t}, {0, 1, -t},
                                     {t, 0, -1}, {t, 0, 1},   {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : verts) v = v.normalized() * 0.5;
    std::vector<std::array<std::uint32_t, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (int level = 0; level < 3; ++level) {
        std::vector<std::array<std::uint32_t, 3>> next;
        std::map<std::uint64_t, std::uint32_t> cache;
        auto mid = [&](std::uint32_t a, std::uint32_t b) {
            const std::uint64_t key =
                (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
            auto [it, inserted] = cache.emplace(key, verts.size());
            if (inserted)
                verts.push_back(((verts[a] + verts[b]) * 0.5).normalized() * 0.5);
            return it->second;
        };
        for (const auto& f : faces) {
            const auto ab = mid(f[0], f[1]);
            const auto bc = mid(f[1], f[2]);
            const auto ca = mid(f[2], f[0]);
            next.insert(next.end(),
                        {{f[0], ab, ca}, {f[1], bc, ab}, {f[2], ca, bc}, {ab, bc, ca}});
        }
        faces = std::move(next);
    }
    gsim::TriangleMesh mesh;
    mesh.vertices = std::move(verts);
    mesh.faces = std::move(faces);
    return mesh;
}

void BM_MeshToGaussians(benchmark::State& state) {
    const auto mesh = icosphere_mesh();
    for (auto _ : state) {
        auto field = gsim::mesh_to_gaussians(mesh);
        benchmark::DoNotOptimize(field.primitives.data());
    }
    state.SetItemsProcessed(state.iterations() * mesh.faces.size());
}
BENCHMARK(BM_MeshToGaussians)->Unit(benchmark::kMillisecond);

void BM_GaussiansToMesh(benchmark::State& state) {
    const auto field = gsim::mesh_to_gaussians(icosphere_mesh());
    for (auto _ : state) {
        auto mesh = gsim::gaussians_to_mesh(field, 1.0 / 32.0, 2000);
        benchmark::DoNotOptimize(mesh.vertices.data());
    }
}
BENCHMARK(BM_GaussiansToMesh)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
