#pragma once

#include <string>

#include "pipescan/hough.hpp"
#include "pipescan/pipeline.hpp"

// Per-frame orchestration: lens undistortion, masking, center detection,
// ray casting, stereo matching, ring computation and colorization, with
// per-stage timings for the throughput reports.

namespace pipescan {

struct ProcessParams {
    int threshold = 0; // 0 = per-frame Otsu split (clamped to >= 16)
    bool thinning = true;
    int min_mask_pixels = 64;
    int n_rays = 3000;
    HoughParams hough;
    RayCastParams rays;
    MatchParams match;
};

struct StageTimings {
    double undistort_ms = 0.0;
    double mask_ms = 0.0;
    double hough_ms = 0.0;
    double rays_ms = 0.0;
    double match_ms = 0.0;
    double ring_ms = 0.0;
    double colorize_ms = 0.0;

    double total_ms() const {
        return undistort_ms + mask_ms + hough_ms + rays_ms + match_ms + ring_ms + colorize_ms;
    }
    StageTimings& operator+=(const StageTimings& o);
};

struct FrameResult {
    bool ok = false;
    std::string error;
    RingProfile ring;
    RingCenter left_center, right_center;
    int no_peak_count = 0;
    int predicted_count = 0;
    int missed_rays = 0;
    StageTimings timings;
    BinaryMask left_mask; // retained only when keep_masks is set
};

// Inverse resampling maps that remove lens distortion from a frame; the
// output image is an ideal pinhole view under the same intrinsics.
class UndistortMaps {
public:
    UndistortMaps() = default;
    explicit UndistortMaps(const CameraModel& cam);

    bool identity() const { return identity_; }
    GrayImage apply(const GrayImage& src) const;
    void apply_serial(const GrayImage& src, GrayImage& dst) const;
    void apply_omp(const GrayImage& src, GrayImage& dst) const;

private:
    int width_ = 0;
    int height_ = 0;
    bool identity_ = true;
    std::vector<float> src_x_, src_y_;
};

class FrameProcessor {
public:
    FrameProcessor(const StereoRig& rig, const CameraModel& rgb_cam, const ProcessParams& params);

    // rgb may be null (no colorization). Failures are reported in the
    // result, not thrown; a scan keeps going past bad frames.
    FrameResult process(const GrayImage& left, const GrayImage& right, const RgbImage* rgb,
                        int ring_index, double axial_position_m, bool keep_masks = false) const;

    const StereoRig& pinhole_rig() const { return pinhole_; }
    const ProcessParams& params() const { return params_; }

private:
    StereoRig pinhole_;
    CameraModel rgb_cam_;
    ProcessParams params_;
    UndistortMaps left_maps_, right_maps_;
};

} // namespace pipescan
