// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "gsim/scene.hpp"

namespace gsim {

struct BenchOptions {
    int cameras = 5;
    int width = 640;
    int height = 480;
    double seconds = 2.0;   // timed-region target; at least min_frames run anyway
    int threads = 0;        // 0 = current default
    int warmup_frames = 30; // excluded from timing
    int min_frames = 30;
    std::string machine;   // defaults to machine_descriptor()
    bool run_brute_force = true;
    int brute_crop = 128;  // brute-force reference crop edge, pixels
};

struct BenchReport {
    std::size_t primitives = 0;
    int width = 0, height = 0;
    int cameras = 0;
    int frames = 0;          // timed frames (each renders all cameras)
    double wall_time = 0.0;  // seconds, timed region only
    double fps = 0.0;        // frames * cameras / wall_time
    int threads = 0;
    std::string machine;
    std::uint64_t image_hash = 0;  // canonical hash of the first timed frame
    // Brute-force reference on a center crop, scaled per pixel.
    double brute_wall = 0.0;
    int brute_crop = 0;
    double brute_speedup = 0.0;
};

std::string machine_descriptor();

// Timed loop over a synthesized camera ring with the first interactive node
// rotating; asset load and file writes stay outside the timed region.
BenchReport run_bench(Scene& scene, const BenchOptions& options);

// Appends/updates this machine's row in the JSON report (a table of
// per-machine FPS rows plus the full run record).
void write_bench_report(const BenchReport& report, const std::string& path);

std::string format_bench_table(const std::string& report_path);

}  // namespace gsim
