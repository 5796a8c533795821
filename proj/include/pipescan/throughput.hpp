#pragma once

#include <string>
#include <vector>

#include "pipescan/process.hpp"

namespace pipescan {

struct FramePair {
    GrayImage left;
    GrayImage right;
};

struct ThroughputReport {
    int points_per_frame = 0;
    double fps = 0.0;
    int frames = 0;
    double ms_total = 0.0; // mean per-frame latency
    double ms_undistort = 0.0;
    double ms_mask = 0.0;
    double ms_hough = 0.0;
    double ms_rays = 0.0;
    double ms_match = 0.0;
    double ms_ring = 0.0;
    double latency_cv = 0.0; // coefficient of variation over 10-frame blocks
};

// Runs the full per-frame pipeline (mask -> center -> rays -> match -> ring)
// over at least 100 frames per points-per-frame setting, cycling through the
// provided frames as needed. Colorization is excluded; it is not part of the
// depth path.
std::vector<ThroughputReport> measure_throughput(const std::vector<FramePair>& frames,
                                                 const StereoRig& rig, const ProcessParams& base,
                                                 const std::vector<int>& ray_settings,
                                                 int min_frames = 100);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

void write_throughput_csv(const std::vector<ThroughputReport>& reports, const std::string& path);

// Aligned-column text table, with the reference frame rates for the standard
// 1000/3000/6000 settings alongside the measurement.
std::string format_throughput_table(const std::vector<ThroughputReport>& reports);

// Reference frame rate for a points-per-frame setting (0 when unlisted).
double reference_fps(int points_per_frame);

} // namespace pipescan
