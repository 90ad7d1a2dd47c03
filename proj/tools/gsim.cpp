// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gsim/augment.hpp"
#include "gsim/bench.hpp"
#include "gsim/errors.hpp"
#include "gsim/hash.hpp"
#include "gsim/image_io.hpp"
#include "gsim/log.hpp"
#include "gsim/mesh_io.hpp"
#include "gsim/parallel.hpp"
#include "gsim/pointcloud_io.hpp"
#include "gsim/pose_stream.hpp"
#include "gsim/scene.hpp"
#include "gsim/splat_ply.hpp"
#include "gsim/transfer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitValidation = 2;

struct RenderArgs {
    std::string manifest;
    std::string pose_stream;
    std::string camera_id;
    double time = 0.0;
    std::string out_prefix;
    bool normalize_depth = false;
    bool depth_png16 = false;
};

int cmd_render(const RenderArgs& args) {
    gsim::Scene scene = gsim::Scene::load(args.manifest);
    if (!args.pose_stream.empty())
        scene.step_to(gsim::PoseStream::load(args.pose_stream), args.time);
    const gsim::CameraModel camera = scene.camera(args.camera_id);

    gsim::RasterOptions options;
    options.normalize_depth = args.normalize_depth;
    const auto targets = scene.render_all({camera}, options);
    const gsim::RenderTarget& target = targets.front();

    gsim::write_png_rgb8(args.out_prefix + "_rgb.png", target.rgb, /*srgb_encode=*/true);
    gsim::write_pfm(args.out_prefix + "_depth.pfm", target.depth);
    gsim::write_png_gray8(args.out_prefix + "_alpha.png", target.accum_alpha);
    if (args.depth_png16)
        gsim::write_png_gray16(args.out_prefix + "_depth.png", target.depth, 1000.0);

    std::printf("rendered %s: %dx%d, image hash %s\n", args.camera_id.c_str(), camera.width,
                camera.height, gsim::to_hex(gsim::hash_target(target)).c_str());
    return kExitOk;
}

struct LidarArgs {
    std::string manifest;
    std::string pose_stream;
    std::string lidar_id;
    double time = 0.0;
    std::string out;
    bool ascii = false;
};

int cmd_lidar(const LidarArgs& args) {
    gsim::Scene scene = gsim::Scene::load(args.manifest);
    if (!args.pose_stream.empty())
        scene.step_to(gsim::PoseStream::load(args.pose_stream), args.time);
    const gsim::LidarModel lidar = scene.lidar(args.lidar_id);

    const auto bvh = gsim::GaussianBvh::build(scene.field(), scene.nodes());
    const gsim::PointCloud cloud = bvh.scan(lidar);
    gsim::save_pointcloud(cloud, args.out, args.ascii);

    std::printf("scanned %s: %zu returns of %zu rays -> %s\n", args.lidar_id.c_str(),
                cloud.size(), lidar.channels.size() * gsim::lidar_azimuth_count(lidar),
                args.out.c_str());
    return kExitOk;
}

struct ConvertArgs {
    std::string direction;
    std::string in;
    std::string out;
    double voxel_size = 0.0;  // 0 = auto (bbox diagonal / 64)
    std::size_t target_faces = 5000;
    std::string dump_volume;
};

int cmd_convert(const ConvertArgs& args) {
    const auto ext = [](const std::string& p) {
        const auto dot = p.find_last_of('.');
        std::string e = dot == std::string::npos ? "" : p.substr(dot + 1);
        std::transform(e.begin(), e.end(), e.begin(), ::tolower);
        return e;
    };
    if (args.direction == "mesh2gs") {
        if (ext(args.in) != "obj" && ext(args.in) != "stl")
            throw gsim::validation_error("mesh2gs expects an .obj/.stl input, got '" +
                                         args.in + "'");
        if (ext(args.out) != "ply")
            throw gsim::validation_error("mesh2gs writes a splat .ply, got '" + args.out +
                                         "'");
        const gsim::TriangleMesh mesh = gsim::load_mesh(args.in);
        const gsim::GaussianField field = gsim::mesh_to_gaussians(mesh);
        gsim::save_splat_ply(field, args.out);
        std::printf("mesh2gs: %zu faces -> %zu primitives\n", mesh.faces.size(),
                    field.size());
        return kExitOk;
    }
    if (args.direction == "gs2mesh") {
        if (ext(args.in) != "ply")
            throw gsim::validation_error("gs2mesh expects a splat .ply input, got '" +
                                         args.in + "'");
        if (ext(args.out) != "obj" && ext(args.out) != "stl")
            throw gsim::validation_error("gs2mesh writes .obj/.stl, got '" + args.out + "'");
        const gsim::GaussianField field = gsim::load_splat_ply(args.in);
        double voxel = args.voxel_size;
        if (voxel <= 0.0) {
            gsim::Aabb box;
            for (const auto& p : field.primitives) box.expand(p.mean);
            voxel = std::max(box.extent().norm() / 64.0, 1e-6);
        }
        gsim::TsdfVolume volume;
        const gsim::TriangleMesh mesh = gsim::gaussians_to_mesh(
            field, voxel, args.target_faces,
            args.dump_volume.empty() ? nullptr : &volume);
        gsim::save_mesh(mesh, args.out);
        if (!args.dump_volume.empty()) volume.save_raw(args.dump_volume);

        // Self-check: resample the field (primitive means) against the mesh.
        std::vector<gsim::Vec3> samples;
        const std::size_t stride = std::max<std::size_t>(1, field.size() / 2000);
        for (std::size_t i = 0; i < field.size(); i += stride)
            samples.push_back(field.primitives[i].mean);
        const double hausdorff = gsim::max_distance_to_mesh(samples, mesh);
        std::printf("gs2mesh: %zu primitives -> %zu faces (voxel %.4g m, "
                    "field-to-mesh distance %.4g m)\n",
                    field.size(), mesh.faces.size(), voxel, hausdorff);
        return kExitOk;
    }
    throw gsim::validation_error("unknown convert direction '" + args.direction +
                                 "' (use mesh2gs or gs2mesh)");
}

struct BenchArgs {
    std::string manifest;
    int cameras = 5;
    int width = 640;
    int height = 480;
    double seconds = 2.0;
    std::string report;
    std::string machine;
    bool no_brute = false;
};

int cmd_bench(const BenchArgs& args) {
    gsim::Scene scene = gsim::Scene::load(args.manifest);
    gsim::BenchOptions options;
    options.cameras = args.cameras;
    options.width = args.width;
    options.height = args.height;
    options.seconds = args.seconds;
    options.machine = args.machine;
    options.run_brute_force = !args.no_brute;
    const gsim::BenchReport report = gsim::run_bench(scene, options);

    std::printf("bench: %zu primitives, %d cameras at %dx%d, %d frames in %.3f s -> "
                "%.1f FPS (threads %d)\n",
                report.primitives, report.cameras, report.width, report.height,
                report.frames, report.wall_time, report.fps, report.threads);
    std::printf("image hash %s\n", gsim::to_hex(report.image_hash).c_str());
    if (!args.no_brute)
        std::printf("brute-force reference: %dx%d crop in %.3f s -> speedup %.1fx\n",
                    report.brute_crop, report.brute_crop, report.brute_wall,
                    report.brute_speedup);
    if (!args.report.empty()) {
        gsim::write_bench_report(report, args.report);
        std::printf("%s", gsim::format_bench_table(args.report).c_str());
    }
    return kExitOk;
}

struct AugmentArgs {
    std::string in_dir;
    std::string config;
    std::string out_dir;
    std::string replay;
    std::optional<std::uint64_t> seed_override;
};

int cmd_augment(const AugmentArgs& args) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(args.in_dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() == ".png") files.push_back(entry.path().filename());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw gsim::validation_error("no PNG files in '" + args.in_dir + "'");
    fs::create_directories(args.out_dir);

    if (!args.replay.empty()) {
        // Replay a previously emitted parameter manifest verbatim.
        std::ifstream in(args.replay);
        if (!in) throw gsim::io_error("cannot open replay manifest '" + args.replay + "'");
        json manifest;
        in >> manifest;
        for (const auto& fj : manifest.at("frames")) {
            gsim::AppliedParams params;
            params.overlay_path = fj.value("overlay", "");
            params.overlay_weight = fj.value("overlay_weight", 0.0);
            params.hue_offset_deg = fj.value("hue", 0.0);
            params.saturation_offset = fj.value("sat", 0.0);
            params.value_offset = fj.value("val", 0.0);
            params.gamma = fj.value("gamma", 1.0);
            const std::string name = fj.at("file").get<std::string>();
            const gsim::Image3 image =
                gsim::read_png_rgb((fs::path(args.in_dir) / name).string());
            const gsim::Image3 out = gsim::apply_params(image, params);
            gsim::write_png_rgb8((fs::path(args.out_dir) / name).string(), out, false);
        }
        std::printf("replayed %zu frame(s) from %s\n", manifest.at("frames").size(),
                    args.replay.c_str());
        return kExitOk;
    }

    gsim::AugmentationConfig config = gsim::load_augmentation_config(args.config);
    if (args.seed_override) config.seed = *args.seed_override;

    json frames = json::array();
    for (std::size_t i = 0; i < files.size(); ++i) {
        const gsim::Image3 image =
            gsim::read_png_rgb((fs::path(args.in_dir) / files[i]).string());
        gsim::AppliedParams params;
        const gsim::Image3 out = gsim::augment(image, config, i, &params);
        gsim::write_png_rgb8((fs::path(args.out_dir) / files[i]).string(), out, false);
        frames.push_back(json{{"frame", i},
                              {"file", files[i]},
                              {"overlay", params.overlay_path},
                              {"overlay_weight", params.overlay_weight},
                              {"hue", params.hue_offset_deg},
                              {"sat", params.saturation_offset},
                              {"val", params.value_offset},
                              {"gamma", params.gamma}});
    }
    const json manifest{{"seed", config.seed}, {"frames", frames}};
    const std::string manifest_path = (fs::path(args.out_dir) / "params.json").string();
    std::ofstream out(manifest_path, std::ios::trunc);
    if (!out) throw gsim::io_error("cannot open '" + manifest_path + "' for writing");
    out << manifest.dump(2) << "\n";
    std::printf("augmented %zu frame(s); parameter manifest at %s\n", files.size(),
                manifest_path.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-splatting sensor simulation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    int threads = 0;
    std::string log_level = "info";
    std::optional<std::uint64_t> seed;
    app.add_option("--threads", threads, "Worker threads (0 = GSIM_THREADS or hardware)");
    app.add_option("--log-level", log_level, "error|warn|info|debug");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Override augmentation seed");

    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "Render RGB/depth/alpha for one camera");
    render->add_option("manifest", render_args.manifest, "Scene manifest JSON")->required();
    render->add_option("--pose-stream", render_args.pose_stream, "Pose stream JSONL");
    render->add_option("--camera", render_args.camera_id, "Camera id")->required();
    render->add_option("--time,-t", render_args.time, "Scene time, seconds");
    render->add_option("--out-prefix", render_args.out_prefix, "Output file prefix")
        ->required();
    render->add_flag("--normalize-depth", render_args.normalize_depth,
                     "Divide composited depth by accumulated alpha");
    render->add_flag("--depth-png16", render_args.depth_png16,
                     "Also write 16-bit millimeter depth PNG");

    LidarArgs lidar_args;
    auto* lidar = app.add_subcommand("lidar", "Simulate one LiDAR scan");
    lidar->add_option("manifest", lidar_args.manifest, "Scene manifest JSON")->required();
    lidar->add_option("--pose-stream", lidar_args.pose_stream, "Pose stream JSONL");
    lidar->add_option("--lidar", lidar_args.lidar_id, "Lidar id")->required();
    lidar->add_option("--time,-t", lidar_args.time, "Scene time, seconds");
    lidar->add_option("--out", lidar_args.out, "Output .ply or .pcd")->required();
    lidar->add_flag("--ascii", lidar_args.ascii, "ASCII instead of binary payload");

    ConvertArgs convert_args;
    auto* convert = app.add_subcommand("convert", "Mesh <-> Gaussian conversion");
    convert->add_option("direction", convert_args.direction, "mesh2gs | gs2mesh")
        ->required();
    convert->add_option("--in", convert_args.in, "Input file")->required();
    convert->add_option("--out", convert_args.out, "Output file")->required();
    convert->add_option("--voxel-size", convert_args.voxel_size,
                        "TSDF voxel size in meters (gs2mesh; 0 = bbox diagonal / 64)");
    convert->add_option("--target-faces", convert_args.target_faces,
                        "Decimation face target (gs2mesh)");
    convert->add_option("--dump-volume", convert_args.dump_volume,
                        "Also write the fused TSDF as a raw float32 grid (gs2mesh)");

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Rendering throughput benchmark");
    bench->add_option("manifest", bench_args.manifest, "Scene manifest JSON")->required();
    bench->add_option("--cameras", bench_args.cameras, "Camera count");
    bench->add_option("--width", bench_args.width, "Per-camera width");
    bench->add_option("--height", bench_args.height, "Per-camera height");
    bench->add_option("--seconds", bench_args.seconds, "Timed-region target seconds");
    bench->add_option("--report", bench_args.report, "Bench report JSON path (rows merge)");
    bench->add_option("--machine", bench_args.machine, "Machine label for the report row");
    bench->add_flag("--no-brute", bench_args.no_brute, "Skip the brute-force reference");

    AugmentArgs augment_args;
    auto* augment = app.add_subcommand("augment", "Image-space domain randomization");
    augment->add_option("--in-dir", augment_args.in_dir, "Directory of PNG frames")
        ->required();
    augment->add_option("--config", augment_args.config, "Augmentation config JSON");
    augment->add_option("--out-dir", augment_args.out_dir, "Output directory")->required();
    augment->add_option("--replay", augment_args.replay,
                        "Replay a parameter manifest instead of sampling");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the help or parse error
        return code == 0 ? kExitOk : kExitValidation;
    }

    gsim::set_thread_count(threads);
    if (!gsim::set_log_level(log_level)) {
        std::fprintf(stderr, "unknown log level '%s'\n", log_level.c_str());
        return kExitValidation;
    }
    if (seed_opt->count() > 0) seed = seed_value;
    augment_args.seed_override = seed;

    try {
        if (render->parsed()) return cmd_render(render_args);
        if (lidar->parsed()) return cmd_lidar(lidar_args);
        if (convert->parsed()) return cmd_convert(convert_args);
        if (bench->parsed()) return cmd_bench(bench_args);
        if (augment->parsed()) {
            if (augment_args.replay.empty() && augment_args.config.empty())
                throw gsim::validation_error("augment needs --config or --replay");
            return cmd_augment(augment_args);
        }
    } catch (const gsim::validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const gsim::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
    return kExitOk;
}
