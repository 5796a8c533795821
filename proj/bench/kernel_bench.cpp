// Times the serial reference kernels against their OpenMP counterparts on a
// representative frame, then the full per-frame pipeline in both modes.
//
//   kernel_bench [--quick] [--frames N]

#include <chrono>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <string>

#include "pipescan/hough.hpp"
#include "pipescan/parallel.hpp"
#include "pipescan/process.hpp"
#include "pipescan/scanio.hpp"
#include "pipescan/scene.hpp"
#include "pipescan/throughput.hpp"

using namespace pipescan;

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& fn, int repeats) {
    const auto t0 = Clock::now();
    for (int i = 0; i < repeats; ++i) fn();
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count() / repeats;
}

void print_row(const std::string& name, double serial_ms, double parallel_ms) {
    std::cout << std::left << std::setw(22) << name << std::right << std::fixed
              << std::setprecision(3) << std::setw(12) << serial_ms << std::setw(12) << parallel_ms
              << std::setw(10) << std::setprecision(2) << serial_ms / parallel_ms << "\n";
}

} // namespace

int main(int argc, char** argv) {
    int repeats = 5;
    int frames = 40;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) {
            repeats = 1;
            frames = 6;
        } else if (std::strcmp(argv[i], "--frames") == 0 && i + 1 < argc) {
            frames = std::atoi(argv[++i]);
        }
    }

    // Representative scene: 300 mm pipe, default rig geometry.
    PipeSpec pipe;
    pipe.nominal_diameter = 0.3;
    pipe.length = 1.2;
    LaserPlane plane;
    CameraModel cam;
    cam.intrinsics = {300.0, 300.0, 640.0, 360.0, 0.0, 1280, 720};
    cam.distortion = DistortionCoeffs::make(-0.12, 0.01, 0.0, 2.6);
    StereoRig rig;
    rig.left = cam;
    rig.right = cam;
    rig.baseline = 0.06;
    ScanPose pose;
    pose.axial = 0.3;
    NoiseParams noise;

    std::cout << "threads available: " << hardware_threads() << "\n\n";
    std::cout << std::left << std::setw(22) << "kernel" << std::right << std::setw(12)
              << "serial ms" << std::setw(12) << "omp ms" << std::setw(10) << "speedup"
              << "\n";

    // Curve rasterization + finalize, via the public render entry.
    {
        const CameraModel posed = posed_camera(cam, pose);
        set_exec_mode(ExecMode::serial);
        const double s = time_ms([&] { (void)render_ir_frame(pipe, pose, plane, posed, noise, 1); },
                                 repeats);
        set_exec_mode(ExecMode::parallel);
        const double p = time_ms([&] { (void)render_ir_frame(pipe, pose, plane, posed, noise, 1); },
                                 repeats);
        print_row("ir_render", s, p);
    }

    // RGB ray casting.
    {
        CameraModel rgb;
        rgb.intrinsics = {140.0, 140.0, 320.0, 180.0, 0.0, 640, 360};
        rgb.distortion = DistortionCoeffs::make(-0.03, 0.0, 0.0, 2.7);
        const CameraModel posed = posed_camera(rgb, pose, {0.0, -0.02, 0.0});
        RgbImage out;
        const double s = time_ms([&] { raycast_rgb_serial(pipe, posed, out); }, repeats);
        const double p = time_ms([&] { raycast_rgb_omp(pipe, posed, out); }, repeats);
        print_row("rgb_raycast", s, p);
    }

    // Frame-level kernels need a frame.
    set_exec_mode(ExecMode::parallel);
    const CameraModel posed_left = posed_camera(cam, pose);
    const GrayImage frame = render_ir_frame(pipe, pose, plane, posed_left, noise, 7);

    // Undistortion warp.
    const UndistortMaps maps(cam);
    {
        GrayImage dst;
        const double s = time_ms([&] { maps.apply_serial(frame, dst); }, repeats);
        const double p = time_ms([&] { maps.apply_omp(frame, dst); }, repeats);
        print_row("undistort_warp", s, p);
    }

    const GrayImage undist = maps.apply(frame);
    const int threshold = std::max(16, otsu_threshold(undist));

    // Threshold + thinning.
    BinaryMask mask;
    {
        const double s = time_ms(
            [&] {
                BinaryMask m = threshold_image_serial(undist, threshold);
                thin_mask_serial(m);
                mask = std::move(m);
            },
            repeats);
        const double p = time_ms(
            [&] {
                BinaryMask m = threshold_image_omp(undist, threshold);
                thin_mask_omp(m);
                mask = std::move(m);
            },
            repeats);
        print_row("mask_thin", s, p);
    }

    // Hough voting (the fine grid of detect_center).
    {
        std::vector<MaskPoint> pts;
        for (int y = 0; y < mask.height; ++y)
            for (int x = 0; x < mask.width; ++x)
                if (mask.at(x, y)) pts.push_back({float(x), float(y)});
        HoughGrid grid;
        grid.cx0 = 590;
        grid.cy0 = 310;
        grid.ncx = grid.ncy = 101;
        grid.center_step = 1.0;
        grid.r0 = 250;
        grid.nr = 50;
        grid.r_step = 2.0;
        std::vector<int> acc;
        const double s = time_ms([&] { hough_vote_serial(pts, grid, acc); }, repeats);
        const double p = time_ms([&] { hough_vote_omp(pts, grid, acc); }, repeats);
        print_row("hough_vote", s, p);
    }

    // Ray casting + stereo matching.
    {
        const RingCenter center = detect_center(mask, 80, 345);
        RayCastResult rays;
        RayCastParams rp;
        const double s =
            time_ms([&] { cast_rays_serial(mask, undist, center, 3000, rp, rays); }, repeats);
        const double p =
            time_ms([&] { cast_rays_omp(mask, undist, center, 3000, rp, rays); }, repeats);
        print_row("cast_rays", s, p);

        const CameraModel posed_right = posed_camera(cam, pose, {rig.baseline, 0.0, 0.0});
        const GrayImage right = maps.apply(render_ir_frame(pipe, pose, plane, posed_right, noise, 8));
        const BinaryMask rmask = extract_mask(right, threshold, true);
        const RingCenter rcenter = detect_center(rmask, 80, 345);
        StereoRig pin = rig;
        pin.left = rig.left.pinhole();
        pin.right = rig.right.pinhole();
        set_exec_mode(ExecMode::serial);
        const double ms = time_ms([&] { (void)match_stereo(rays.hits, right, rcenter, pin); }, repeats);
        set_exec_mode(ExecMode::parallel);
        const double mp = time_ms([&] { (void)match_stereo(rays.hits, right, rcenter, pin); }, repeats);
        print_row("match_stereo", ms, mp);
    }

    // End-to-end frame pipeline at 3000 rays.
    {
        std::vector<FramePair> pairs;
        for (int i = 0; i < frames; ++i) {
            ScanPose p = pose;
            p.axial = 0.2 + 0.004 * i;
            pairs.push_back(
                {render_ir_frame(pipe, p, plane, posed_camera(cam, p), noise, hash_combine(i, 1)),
                 render_ir_frame(pipe, p, plane, posed_camera(cam, p, {rig.baseline, 0.0, 0.0}),
                                 noise, hash_combine(i, 2))});
        }
        ProcessParams params;
        CameraModel no_rgb;
        const FrameProcessor proc(rig, no_rgb, params);
        set_exec_mode(ExecMode::serial);
        const double s = time_ms(
            [&] {
                for (const FramePair& f : pairs) (void)proc.process(f.left, f.right, nullptr, 0, 0.0);
            },
            1) / frames;
        set_exec_mode(ExecMode::parallel);
        const double p = time_ms(
            [&] {
                for (const FramePair& f : pairs) (void)proc.process(f.left, f.right, nullptr, 0, 0.0);
            },
            1) / frames;
        print_row("frame_pipeline", s, p);
        std::cout << "\nframe_pipeline fps (omp, 3000 rays): " << std::fixed << std::setprecision(1)
                  << 1000.0 / p << "\n";
    }
    return 0;
}
