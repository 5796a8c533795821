#include "pipescan/process.hpp"

#include <chrono>
#include <cmath>

#include "pipescan/parallel.hpp"

namespace pipescan {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

} // namespace

StageTimings& StageTimings::operator+=(const StageTimings& o) {
    undistort_ms += o.undistort_ms;
    mask_ms += o.mask_ms;
    hough_ms += o.hough_ms;
    rays_ms += o.rays_ms;
    match_ms += o.match_ms;
    ring_ms += o.ring_ms;
    colorize_ms += o.colorize_ms;
    return *this;
}

UndistortMaps::UndistortMaps(const CameraModel& cam) {
    width_ = cam.intrinsics.width;
    height_ = cam.intrinsics.height;
    identity_ = cam.distortion.is_zero();
    if (identity_) return;
    src_x_.resize(static_cast<std::size_t>(width_) * height_);
    src_y_.resize(src_x_.size());
    const CameraIntrinsics& k = cam.intrinsics;
    for (int v = 0; v < height_; ++v)
        for (int u = 0; u < width_; ++u) {
            const double yn = (v - k.cy) / k.fy;
            const double xn = (u - k.cx - k.skew * yn) / k.fx;
            const PixelPoint nd = distort_point({xn, yn}, cam.distortion);
            const std::size_t i = static_cast<std::size_t>(v) * width_ + u;
            src_x_[i] = static_cast<float>(k.fx * nd.x + k.skew * nd.y + k.cx);
            src_y_[i] = static_cast<float>(k.fy * nd.y + k.cy);
        }
}

void UndistortMaps::apply_serial(const GrayImage& src, GrayImage& dst) const {
    dst = GrayImage(width_, height_);
    for (int v = 0; v < height_; ++v)
        for (int u = 0; u < width_; ++u) {
            const std::size_t i = static_cast<std::size_t>(v) * width_ + u;
            const double s = sample_bicubic(src, src_x_[i], src_y_[i]);
            dst.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(s), 0L, 255L));
        }
}

void UndistortMaps::apply_omp(const GrayImage& src, GrayImage& dst) const {
    dst = GrayImage(width_, height_);
#pragma omp parallel for schedule(static)
    for (int v = 0; v < height_; ++v)
        for (int u = 0; u < width_; ++u) {
            const std::size_t i = static_cast<std::size_t>(v) * width_ + u;
            const double s = sample_bicubic(src, src_x_[i], src_y_[i]);
            dst.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(s), 0L, 255L));
        }
}

GrayImage UndistortMaps::apply(const GrayImage& src) const {
    if (identity_) return src;
    if (src.width != width_ || src.height != height_)
        raise(ErrorKind::InvalidArgument, "frame size does not match the camera model");
    GrayImage dst;
    if (parallel_enabled())
        apply_omp(src, dst);
    else
        apply_serial(src, dst);
    return dst;
}

FrameProcessor::FrameProcessor(const StereoRig& rig, const CameraModel& rgb_cam,
                               const ProcessParams& params)
    : rgb_cam_(rgb_cam), params_(params) {
    rig.validate();
    pinhole_ = rig;
    pinhole_.left = rig.left.pinhole();
    pinhole_.right = rig.right.pinhole();
    left_maps_ = UndistortMaps(rig.left);
    right_maps_ = UndistortMaps(rig.right);
}

FrameResult FrameProcessor::process(const GrayImage& left, const GrayImage& right,
                                    const RgbImage* rgb, int ring_index, double axial_position_m,
                                    bool keep_masks) const {
    FrameResult result;
    try {
        auto t0 = Clock::now();
        const GrayImage left_u = left_maps_.apply(left);
        const GrayImage right_u = right_maps_.apply(right);
        result.timings.undistort_ms = ms_since(t0);

        t0 = Clock::now();
        const int thr_left =
            params_.threshold > 0 ? params_.threshold : std::max(16, otsu_threshold(left_u));
        const int thr_right =
            params_.threshold > 0 ? params_.threshold : std::max(16, otsu_threshold(right_u));
        BinaryMask left_mask = extract_mask(left_u, thr_left, params_.thinning, params_.min_mask_pixels);
        BinaryMask right_mask =
            extract_mask(right_u, thr_right, params_.thinning, params_.min_mask_pixels);
        result.timings.mask_ms = ms_since(t0);

        t0 = Clock::now();
        result.left_center = detect_center(left_mask, params_.hough);
        result.right_center = detect_center(right_mask, params_.hough);
        result.timings.hough_ms = ms_since(t0);

        t0 = Clock::now();
        const RayCastResult rays = cast_rays(left_mask, left_u, result.left_center, params_.n_rays,
                                             params_.rays);
        result.missed_rays = static_cast<int>(rays.missed_rays.size());
        result.timings.rays_ms = ms_since(t0);

        t0 = Clock::now();
        const MatchResult matched =
            match_stereo(rays.hits, right_u, result.right_center, pinhole_, params_.match);
        result.no_peak_count = matched.no_peak_count;
        result.predicted_count = matched.predicted_count;
        result.timings.match_ms = ms_since(t0);

        t0 = Clock::now();
        result.ring = compute_ring(matched.matches, pinhole_, ring_index, axial_position_m,
                                   params_.n_rays);
        result.timings.ring_ms = ms_since(t0);

        if (rgb) {
            t0 = Clock::now();
            colorize_ring(result.ring, *rgb, rgb_cam_);
            result.timings.colorize_ms = ms_since(t0);
        }
        if (keep_masks) result.left_mask = std::move(left_mask);
        result.ok = true;
    } catch (const Error& e) {
        result.ok = false;
        result.error = e.what();
    }
    return result;
}

} // namespace pipescan
