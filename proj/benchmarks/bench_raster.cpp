// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "gsim/raster.hpp"

namespace {

gsim::CameraModel vga_camera() {
    gsim::CameraModel cam;
    cam.fx = cam.fy = 500.0;
    cam.cx = 320.0;
    cam.cy = 240.0;
    cam.width = 640;
    cam.height = 480;
    cam.near = 0.05;
    cam.far = 100.0;
    cam.pose.translation = {0.0, 0.0, 4.0};
    return cam;
}

void BM_Project(benchmark::State& state) {
    const auto field =
        bench::random_field(1, static_cast<std::size_t>(state.range(0)), 6.0, 0.01, 0.05);
    const auto cam = vga_camera();
    for (auto _ : state) {
        auto splats = gsim::project(field, {}, cam);
        benchmark::DoNotOptimize(splats.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Project)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_RasterizeVga(benchmark::State& state) {
    const auto field =
        bench::random_field(2, static_cast<std::size_t>(state.range(0)), 6.0, 0.01, 0.05);
    const auto cam = vga_camera();
    const auto splats = gsim::project(field, {}, cam);
    for (auto _ : state) {
        auto target = gsim::rasterize(splats, cam);
        benchmark::DoNotOptimize(target.rgb.data.data());
    }
    state.SetItemsProcessed(state.iterations() * cam.width * cam.height);
}
BENCHMARK(BM_RasterizeVga)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
