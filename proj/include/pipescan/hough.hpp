#pragma once

#include <vector>

#include "pipescan/mask.hpp"

namespace pipescan {

struct RingCenter {
    double cx = 0.0;
    double cy = 0.0;
    double r_est = 0.0;
    double confidence = 0.0; // accumulator peak ratio, 0..1
};

struct HoughParams {
    double r_min = 80.0;
    double r_max = 345.0;
    double confidence_floor = 0.3;
    int min_votes = 40;
    int coarse_step = 4;      // px per coarse center/radius cell
    int coarse_halfspan = 96; // px search span around the mask centroid
    int fine_halfspan = 5;    // px fine center window
    int fine_r_halfspan = 6;  // px fine radius window (2 px bins)
    int coarse_points = 500;  // decimation target for the coarse stage
};

// Circular Hough accumulator over (cx, cy, r): a coarse pass seeded at the
// mask centroid followed by a 1 px / 2 px fine pass around the coarse peak,
// with 3-point quadratic sub-pixel interpolation of the fine peak.
// Throws NoCircle when the peak fails the confidence floor.
RingCenter detect_center(const BinaryMask& mask, double r_min, double r_max);
RingCenter detect_center(const BinaryMask& mask, const HoughParams& params);

// Voting kernel (exposed for the benchmark): accumulates distance-binned
// votes of every point for every candidate center of a regular grid.
struct HoughGrid {
    double cx0 = 0.0, cy0 = 0.0;
    int ncx = 0, ncy = 0;
    double center_step = 1.0;
    double r0 = 0.0;
    int nr = 0;
    double r_step = 1.0;

    std::size_t size() const { return static_cast<std::size_t>(ncx) * ncy * nr; }
};

struct MaskPoint {
    float x, y;
};

void hough_vote_serial(const std::vector<MaskPoint>& pts, const HoughGrid& grid,
                       std::vector<int>& acc);
void hough_vote_omp(const std::vector<MaskPoint>& pts, const HoughGrid& grid,
                    std::vector<int>& acc);

} // namespace pipescan
