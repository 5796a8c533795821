#include "pipescan/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pipescan/parallel.hpp"
#include "pipescan/ply.hpp"
#include "pipescan/process.hpp"
#include "pipescan/scanio.hpp"
#include "pipescan/throughput.hpp"

namespace pipescan {

namespace fs = std::filesystem;

namespace {

std::string frame_name(const char* stem, int index, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%04d.%s", stem, index, ext);
    return buf;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) raise(ErrorKind::IoFailure, "cannot create directory " + dir);
}

void copy_into(const std::string& src, const std::string& dst) {
    std::error_code ec;
    fs::copy_file(src, dst, fs::copy_options::overwrite_existing, ec);
    if (ec) raise(ErrorKind::IoFailure, "cannot copy " + src + " to " + dst);
}

} // namespace

int run_simulate(const SimulateOptions& options) {
    if (options.serial) set_exec_mode(ExecMode::serial);
    const SceneConfig scene = load_scene(options.scene_path);
    const RigConfig rig = load_rig(options.rig_path);
    ensure_dir(options.out_dir);

    NoiseParams noise = scene.noise.scaled(options.noise_scale);
    noise.seed = options.seed;

    SimOptions sim;
    sim.truth_samples = scene.truth_samples;
    sim.markers = scene.markers;

    ScanManifest manifest;
    manifest.dir = options.out_dir;
    const std::string& dir = options.out_dir;

    simulate_scan(scene.pipe, scene.trajectory(), rig.rig, rig.rgb, rig.laser, scene.wheel, noise,
                  sim, [&](FrameBundle&& bundle) {
                      ScanFrameEntry entry;
                      entry.index = bundle.index;
                      entry.left = frame_name("left", bundle.index, "pgm");
                      entry.right = frame_name("right", bundle.index, "pgm");
                      entry.rgb = frame_name("rgb", bundle.index, "ppm");
                      entry.truth = frame_name("truth", bundle.index, "csv");
                      entry.ticks = bundle.encoder_ticks;
                      entry.pose = bundle.pose_truth;
                      write_pgm(bundle.left_ir, dir + "/" + entry.left);
                      write_pgm(bundle.right_ir, dir + "/" + entry.right);
                      write_ppm(bundle.rgb, dir + "/" + entry.rgb);
                      write_truth_csv(bundle.ring_truth, dir + "/" + entry.truth);
                      manifest.frames.push_back(entry);
                      if (!options.quiet && (bundle.index + 1) % 50 == 0)
                          std::cout << "simulated " << bundle.index + 1 << " frames\n";
                  });

    write_manifest(manifest, dir + "/manifest.csv");
    copy_into(options.scene_path, dir + "/scene.txt");
    copy_into(options.rig_path, dir + "/rig.txt");

    KeyValueFile meta;
    meta.set("frames", static_cast<long long>(manifest.frames.size()));
    meta.set("seed", static_cast<long long>(options.seed));
    meta.set("noise_scale", options.noise_scale);
    meta.set("truth.samples", static_cast<long long>(scene.truth_samples));
    meta.set("wheel.circumference", scene.wheel.circumference);
    meta.set("wheel.ppr", static_cast<long long>(scene.wheel.pulses_per_rev));
    meta.save(dir + "/scan.txt");

    if (!options.quiet)
        std::cout << "wrote " << manifest.frames.size() << " frame bundles to " << dir << "\n";
    return kExitOk;
}

int run_process(const ProcessOptions& options) {
    if (options.serial) set_exec_mode(ExecMode::serial);
    const std::string& scan = options.scan_dir;
    const ScanManifest manifest = read_manifest(scan + "/manifest.csv");
    if (manifest.frames.empty()) raise(ErrorKind::InvalidConfig, "scan manifest lists no frames");
    const RigConfig rig = load_rig(scan + "/rig.txt");
    const SceneConfig scene = load_scene(scan + "/scene.txt");
    const KeyValueFile meta = KeyValueFile::load(scan + "/scan.txt");
    WheelSpec wheel;
    wheel.circumference = meta.get_double("wheel.circumference", scene.wheel.circumference);
    wheel.pulses_per_rev = static_cast<int>(meta.get_int("wheel.ppr", scene.wheel.pulses_per_rev));

    ensure_dir(options.out_dir);

    ProcessParams params;
    params.threshold = options.threshold;
    params.n_rays = options.rays;
    params.hough.r_min = options.hough_r_min;
    params.hough.r_max = options.hough_r_max;
    const FrameProcessor processor(rig.rig, rig.rgb, params);

    PipeMap map;
    map.slip_tolerance_m = advance_odometry(2, wheel);
    int frames_ok = 0;
    StageTimings total_timings;

    for (const ScanFrameEntry& entry : manifest.frames) {
        const GrayImage left = read_pgm(scan + "/" + entry.left);
        const GrayImage right = read_pgm(scan + "/" + entry.right);
        const RgbImage rgb = read_ppm(scan + "/" + entry.rgb);

        const double displacement = odometry_displacement(entry.ticks, wheel);
        FrameResult result = processor.process(left, right, &rgb, entry.index, displacement,
                                               options.export_masks);
        if (!result.ok) {
            if (!options.quiet)
                std::cerr << "frame " << entry.index << " failed: " << result.error << "\n";
            continue;
        }
        if (options.export_masks)
            write_mask_pgm(result.left_mask,
                           options.out_dir + "/" + frame_name("mask", entry.index, "pgm"));
        try {
            accumulate_ring(map, std::move(result.ring), displacement);
            ++frames_ok;
            total_timings += result.timings;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NonMonotoneOdometry) throw;
            if (!options.quiet)
                std::cerr << "frame " << entry.index << " rejected: " << e.what() << "\n";
        }
    }

    if (map.rings.empty()) raise(ErrorKind::InvalidConfig, "no frame produced a ring");

    map.bind_nominal(scene.pipe.nominal_diameter);
    const HeatMapStyle style;
    const HeatMapResult heat = compute_heatmap(map, style);
    const RmseReport rmse = compute_rmse(map, scene.pipe.nominal_diameter, true);

    const std::string& out = options.out_dir;
    write_rings_csv(map.rings, out + "/rings.csv");
    write_rmse_csv(rmse, out + "/rmse.csv");
    write_defects_csv(map.defect_regions, out + "/defects.csv");

    const PlyFormat fmt =
        options.ply_format == "ascii" ? PlyFormat::ascii : PlyFormat::binary_little_endian;
    export_ply(cloud_from_map(map), out + "/cloud.ply", fmt);
    export_ply(cloud_from_map(map, &heat.ring_colors), out + "/heatmap.ply", fmt);
    if (map.rings.size() >= 2) {
        export_ply(build_mesh(map, MeshColor::rgb), out + "/mesh.ply", fmt);
        export_ply(build_mesh(map, MeshColor::heatmap, &style), out + "/mesh_heatmap.ply", fmt);
    }

    KeyValueFile mapmeta;
    mapmeta.set("nominal_diameter", scene.pipe.nominal_diameter);
    mapmeta.set("n_rays", static_cast<long long>(options.rays));
    mapmeta.set("frames_total", static_cast<long long>(manifest.frames.size()));
    mapmeta.set("frames_ok", static_cast<long long>(frames_ok));
    mapmeta.set("rings", static_cast<long long>(map.rings.size()));
    mapmeta.set("rejected_rings", static_cast<long long>(map.rejected_rings));
    mapmeta.set("global_rmse_mm", rmse.global_mm);
    mapmeta.set("defect_regions", static_cast<long long>(map.defect_regions.size()));
    mapmeta.save(out + "/map.txt");

    if (!options.quiet) {
        std::cout << "processed " << frames_ok << "/" << manifest.frames.size() << " frames, "
                  << map.rings.size() << " rings, global RMSE " << rmse.global_mm << " mm, "
                  << map.defect_regions.size() << " defect regions\n";
        const double n = std::max(1, frames_ok);
        std::cout << "mean per-frame ms: undistort " << total_timings.undistort_ms / n << ", mask "
                  << total_timings.mask_ms / n << ", hough " << total_timings.hough_ms / n
                  << ", rays " << total_timings.rays_ms / n << ", match "
                  << total_timings.match_ms / n << ", ring " << total_timings.ring_ms / n << "\n";
    }

    const double fraction =
        static_cast<double>(frames_ok) / static_cast<double>(manifest.frames.size());
    return fraction >= options.min_ring_fraction ? kExitOk : kExitProcessing;
}

int run_report(const ReportOptions& options) {
    if (options.serial) set_exec_mode(ExecMode::serial);
    const std::string& in = options.processed_dir;
    const std::string out = options.out_dir.empty() ? in : options.out_dir;
    ensure_dir(out);

    const KeyValueFile mapmeta = KeyValueFile::load(in + "/map.txt");
    const double nominal = mapmeta.get_double("nominal_diameter");
    const int n_rays = static_cast<int>(mapmeta.get_int("n_rays"));

    PipeMap map;
    map.rings = read_rings_csv(in + "/rings.csv");
    if (map.rings.empty()) raise(ErrorKind::InvalidConfig, in + "/rings.csv lists no rings");
    for (RingProfile& ring : map.rings) ring.angular_samples = n_rays;
    map.bind_nominal(nominal);

    const HeatMapStyle style;
    compute_heatmap(map, style);
    const RmseReport rmse = compute_rmse(map, nominal, true);
    write_rmse_csv(rmse, out + "/rmse_series.csv");
    write_defects_csv(map.defect_regions, out + "/defect_summary.csv");

    std::vector<ThroughputReport> reports;
    if (options.throughput) {
        if (options.scan_dir.empty())
            raise(ErrorKind::InvalidConfig, "throughput measurement needs --scan");
        const ScanManifest manifest = read_manifest(options.scan_dir + "/manifest.csv");
        if (manifest.frames.empty()) raise(ErrorKind::InvalidConfig, "scan manifest lists no frames");
        const RigConfig rig = load_rig(options.scan_dir + "/rig.txt");
        std::vector<FramePair> frames;
        const std::size_t want = std::min<std::size_t>(manifest.frames.size(), 120);
        frames.reserve(want);
        for (std::size_t i = 0; i < want; ++i) {
            const ScanFrameEntry& e = manifest.frames[i];
            frames.push_back({read_pgm(options.scan_dir + "/" + e.left),
                              read_pgm(options.scan_dir + "/" + e.right)});
        }
        ProcessParams params;
        reports = measure_throughput(frames, rig.rig, params, options.ray_settings);
        write_throughput_csv(reports, out + "/throughput.csv");
    }

    std::ofstream summary(out + "/summary.txt");
    if (!summary) raise(ErrorKind::IoFailure, "cannot write " + out + "/summary.txt");
    summary << "rings:           " << map.rings.size() << "\n";
    summary << "nominal (mm):    " << nominal * 1000.0 << "\n";
    summary << "global RMSE (mm): " << rmse.global_mm << "\n";
    summary << "defect regions:  " << map.defect_regions.size() << "\n";
    for (std::size_t i = 0; i < map.defect_regions.size(); ++i) {
        const DefectRegion& r = map.defect_regions[i];
        summary << "  region " << i << ": peak " << r.peak_deviation_mm << " mm, sign " << r.sign
                << ", axial [" << r.axial_min << ", " << r.axial_max << "] m\n";
    }
    if (!reports.empty()) {
        summary << "\nthroughput:\n" << format_throughput_table(reports);
        std::vector<double> xs, ys;
        for (const ThroughputReport& r : reports) {
            xs.push_back(r.points_per_frame);
            ys.push_back(r.ms_total);
        }
        if (xs.size() >= 2) {
            const LinearFit fit = linear_fit(xs, ys);
            summary << "latency vs points linear fit: slope " << fit.slope * 1000.0
                    << " us/point, intercept " << fit.intercept << " ms, R^2 " << fit.r2 << "\n";
        }
    }
    summary.close();

    if (!options.quiet) {
        std::cout << "report written to " << out << "\n";
        if (!reports.empty()) std::cout << format_throughput_table(reports);
    }
    return kExitOk;
}

} // namespace pipescan
