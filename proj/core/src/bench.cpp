// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "gsim/errors.hpp"
#include "gsim/hash.hpp"
#include "gsim/parallel.hpp"
#include "gsim/reference_raster.hpp"

namespace gsim {

using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Aabb posed_field_bounds(const Scene& scene) {
    Aabb box;
    for (const auto& node : scene.nodes()) {
        for (std::size_t i = node.range.begin; i < node.range.end; ++i) {
            const auto posed = pose_primitive(scene.field().primitives[i], node.pose);
            box.expand(posed.bounds);
        }
    }
    return box;
}

std::vector<CameraModel> camera_ring(const Scene& scene, int count, int width, int height) {
    Aabb box = posed_field_bounds(scene);
    if (box.empty()) {
        box.expand({-1, -1, -1});
        box.expand({1, 1, 1});
    }
    const Vec3 center = box.center();
    const double diag = std::max(box.extent().norm(), 1e-3);
    const double radius = 1.2 * diag;
    const double focal = 0.8 * width;
    std::vector<CameraModel> cameras;
    for (int k = 0; k < count; ++k) {
        const double azimuth = kTwoPi * k / count;
        const Vec3 eye = center + Vec3{radius * std::cos(azimuth),
                                       radius * std::sin(azimuth), 0.35 * radius};
        CameraModel cam = CameraModel::look_at(eye, center, focal, focal, width, height);
        cam.id = "bench_cam" + std::to_string(k);
        cam.near = 0.01 * radius;
        cam.far = 10.0 * radius;
        cameras.push_back(cam);
    }
    return cameras;
}

// Deterministic node motion per frame index (30 Hz nominal clock).
void pose_frame(Scene& scene, int frame) {
    for (auto& node : scene.nodes()) {
        if (node.kind != NodeKind::interactive) continue;
        const double angle = deg_to_rad(30.0) * frame / 30.0;
        node.pose.rotation = Quat::from_axis_angle({0, 0, 1}, angle);
        return;  // rotate the first interactive node only
    }
}

}  // namespace

std::string machine_descriptor() {
    std::string model = "unknown-cpu";
    std::ifstream cpuinfo("/proc/cpuinfo");
    std::string line;
    while (std::getline(cpuinfo, line)) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) {
                model = line.substr(colon + 1);
                const auto first = model.find_first_not_of(' ');
                if (first != std::string::npos) model = model.substr(first);
            }
            break;
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return model + " (" + std::to_string(hw > 0 ? hw : 1u) + " hw threads)";
}

BenchReport run_bench(Scene& scene, const BenchOptions& options) {
    if (options.cameras < 1) throw validation_error("bench: need at least one camera");
    const int previous_threads = thread_count();
    if (options.threads > 0) set_thread_count(options.threads);

    BenchReport report;
    report.primitives = scene.field().size();
    report.width = options.width;
    report.height = options.height;
    report.cameras = options.cameras;
    report.threads = thread_count();
    report.machine = options.machine.empty() ? machine_descriptor() : options.machine;

    const auto cameras = camera_ring(scene, options.cameras, options.width, options.height);

    for (int frame = 0; frame < options.warmup_frames; ++frame) {
        pose_frame(scene, frame);
        scene.render_all(cameras);
    }

    // Timed region: rendering only.
    int frame = options.warmup_frames;
    int timed = 0;
    std::uint64_t first_hash = 0;
    const auto start = Clock::now();
    while (timed < options.min_frames || seconds_since(start) < options.seconds) {
        pose_frame(scene, frame);
        const auto targets = scene.render_all(cameras);
        if (timed == 0) {
            std::uint64_t h = 1469598103934665603ull;
            for (const auto& target : targets) h = hash_target(target, h);
            first_hash = h;
        }
        ++frame;
        ++timed;
    }
    report.wall_time = seconds_since(start);
    report.frames = timed;
    report.fps = timed * options.cameras / report.wall_time;
    report.image_hash = first_hash;

    if (options.run_brute_force) {
        // Brute-force reference on a center crop of camera 0, scaled per pixel.
        pose_frame(scene, options.warmup_frames);
        CameraModel crop = cameras[0];
        crop.width = options.brute_crop;
        crop.height = options.brute_crop;
        crop.cx = options.brute_crop * 0.5;
        crop.cy = options.brute_crop * 0.5;
        const auto brute_start = Clock::now();
        const auto splats = project(scene.field(), scene.nodes(), crop);
        reference_rasterize(splats, crop);
        report.brute_wall = seconds_since(brute_start);
        report.brute_crop = options.brute_crop;

        const double tiled_pixel_rate =
            static_cast<double>(timed) * options.cameras * options.width * options.height /
            report.wall_time;
        const double brute_pixel_rate =
            static_cast<double>(options.brute_crop) * options.brute_crop / report.brute_wall;
        report.brute_speedup = tiled_pixel_rate / brute_pixel_rate;
    }

    set_thread_count(previous_threads);
    return report;
}

void write_bench_report(const BenchReport& report, const std::string& path) {
    json doc;
    {
        std::ifstream in(path);
        if (in) {
            try {
                in >> doc;
            } catch (const json::exception&) {
                doc = json::object();  // start fresh over unreadable content
            }
        }
    }
    if (!doc.contains("rows") || !doc.at("rows").is_array()) doc["rows"] = json::array();

    json run{{"machine", report.machine},
             {"primitives", report.primitives},
             {"resolution", {report.width, report.height}},
             {"cameras", report.cameras},
             {"frames", report.frames},
             {"wall_time_s", report.wall_time},
             {"fps", report.fps},
             {"threads", report.threads},
             {"image_hash", to_hex(report.image_hash)},
             {"brute_force",
              {{"crop", report.brute_crop},
               {"wall_time_s", report.brute_wall},
               {"speedup", report.brute_speedup}}}};

    // One row per machine label, like the throughput table (machine, FPS).
    auto& rows = doc["rows"];
    bool replaced = false;
    for (auto& row : rows) {
        if (row.value("machine", "") == report.machine) {
            row = json{{"machine", report.machine}, {"fps", report.fps}};
            replaced = true;
        }
    }
    if (!replaced) rows.push_back(json{{"machine", report.machine}, {"fps", report.fps}});
    doc["columns"] = {"machine", "fps"};
    if (!doc.contains("runs") || !doc.at("runs").is_array()) doc["runs"] = json::array();
    doc["runs"].push_back(run);

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << doc.dump(2) << "\n";
    if (!out) throw io_error("write failed for '" + path + "'");
}

std::string format_bench_table(const std::string& report_path) {
    std::ifstream in(report_path);
    if (!in) throw io_error("cannot open bench report '" + report_path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw format_error("'" + report_path + "': " + e.what());
    }
    std::ostringstream out;
    out << "machine                                                      FPS\n";
    out << "------------------------------------------------------------ --------\n";
    char buf[128];
    for (const auto& row : doc.value("rows", json::array())) {
        std::snprintf(buf, sizeof(buf), "%-60s %8.1f\n",
                      row.value("machine", "?").c_str(), row.value("fps", 0.0));
        out << buf;
    }
    return out.str();
}

}  // namespace gsim
