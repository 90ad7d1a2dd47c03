// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "gsim/trace.hpp"

namespace {

void BM_BvhBuild(benchmark::State& state) {
    const auto field =
        bench::random_field(3, static_cast<std::size_t>(state.range(0)), 8.0, 0.01, 0.1);
    for (auto _ : state) {
        auto bvh = gsim::GaussianBvh::build(field, {});
        benchmark::DoNotOptimize(bvh.tree().nodes().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BvhBuild)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_LidarScan(benchmark::State& state) {
    const auto field =
        bench::random_field(4, static_cast<std::size_t>(state.range(0)), 8.0, 0.01, 0.1);
    const auto bvh = gsim::GaussianBvh::build(field, {});
    gsim::LidarModel lidar;
    lidar.id = "bench";
    for (int c = 0; c < 32; ++c)
        lidar.channels.push_back(gsim::deg_to_rad(-16.0 + c));
    lidar.azimuth_step = gsim::deg_to_rad(0.2);
    lidar.max_range = 20.0;
    for (auto _ : state) {
        auto cloud = bvh.scan(lidar);
        benchmark::DoNotOptimize(cloud.points.data());
    }
    state.SetItemsProcessed(state.iterations() * lidar.channels.size() *
                            gsim::lidar_azimuth_count(lidar));
}
BENCHMARK(BM_LidarScan)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace
