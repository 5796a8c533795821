#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pipescan {

// Exit codes shared by the CLI: 0 success, 1 configuration error,
// 2 processing failure, 3 I/O failure.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitProcessing = 2;
constexpr int kExitIo = 3;

struct SimulateOptions {
    std::string scene_path;
    std::string rig_path;
    std::string out_dir;
    std::uint64_t seed = 12345;
    double noise_scale = 1.0; // 0 disables noise
    bool serial = false;
    bool quiet = false;
};

struct ProcessOptions {
    std::string scan_dir; // output of simulate
    std::string out_dir;
    int rays = 3000;
    int threshold = 0; // 0 = auto
    double hough_r_min = 80.0;
    double hough_r_max = 345.0;
    std::string ply_format = "binary"; // or "ascii"
    bool export_masks = false;
    bool serial = false;
    bool quiet = false;
    double min_ring_fraction = 0.9;
};

struct ReportOptions {
    std::string processed_dir; // output of process
    std::string scan_dir;      // needed for throughput measurement
    std::string out_dir;       // defaults to processed_dir
    bool throughput = false;
    std::vector<int> ray_settings{1000, 3000, 6000};
    bool serial = false;
    bool quiet = false;
};

// Each returns a CLI exit code; configuration/I-O problems raise Error.
int run_simulate(const SimulateOptions& options);
int run_process(const ProcessOptions& options);
int run_report(const ReportOptions& options);

} // namespace pipescan
