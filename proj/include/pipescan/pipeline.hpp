#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "pipescan/geometry.hpp"
#include "pipescan/hough.hpp"
#include "pipescan/image.hpp"
#include "pipescan/mask.hpp"

// Per frame-pair processing: rays from the detected center, epipolar stereo
// correspondence, triangulation into a ring profile, RGB colorization, and
// tilt estimation from feature depths.
//
// All operations here expect undistorted images and a pinhole rig; the
// frame processor removes lens distortion before this stage.

namespace pipescan {

constexpr unsigned kFlagColorOutOfFrame = 1u;
constexpr unsigned kFlagPredictedDisparity = 2u;

struct RayHit {
    double angle = 0.0;   // ray angle around the ring center
    PixelPoint pixel{};   // sub-pixel ridge position
    double intensity = 0; // peak sample value
};

struct RayCastResult {
    std::vector<RayHit> hits;
    std::vector<int> missed_rays; // contiguous runs mark occlusion gaps
    int n_rays = 0;
};

struct RayCastParams {
    double march_margin = 60.0;   // px searched around the Hough radius
    double march_step = 0.5;      // px per step of the outward walk
    double inner_start = 10.0;    // px skipped around the center
    double min_hit_fraction = 0.5;
    double intensity_floor = 8.0;
};

// Walks outward from the center along n_rays uniform angles, takes the first
// mask-ridge crossing, and refines it on the intensity image. Rays without a
// crossing are reported in missed_rays. Throws TooSparse below
// min_hit_fraction.
RayCastResult cast_rays(const BinaryMask& mask, const GrayImage& image, const RingCenter& center,
                        int n_rays, const RayCastParams& params = {});
void cast_rays_serial(const BinaryMask& mask, const GrayImage& image, const RingCenter& center,
                      int n_rays, const RayCastParams& params, RayCastResult& out);
void cast_rays_omp(const BinaryMask& mask, const GrayImage& image, const RingCenter& center,
                   int n_rays, const RayCastParams& params, RayCastResult& out);

struct Correspondence {
    PixelPoint left{};
    PixelPoint right{};
    double disparity = 0.0; // left.x - right.x, always > 0
};

struct MatchedHit {
    double angle = 0.0;
    Correspondence corr{};
    double intensity = 0.0;
    unsigned flags = 0;
};

struct MatchParams {
    double tangent_cos = 0.35;     // |cos angle| below which a row barely
                                   // constrains the crossing; those hits get
                                   // their disparity from the ring-plane fit
    double window_halfwidth = 26.0;
    double intensity_floor = 40.0;
    double disparity_floor = 0.5;
    int min_model_points = 8;
};

struct MatchResult {
    std::vector<MatchedHit> matches; // in hit order
    int no_peak_count = 0;
    int predicted_count = 0;
};

// For each left hit, locates the ring crossing of the same row in the right
// image. When a row cuts the ring twice the crossing on the same side of the
// right center as the hit is of the left center is chosen. Near the vertical
// tangent, where a row cannot localize the crossing, the disparity comes
// from the ring-plane disparity model fitted on the well-conditioned hits
// and is verified photometrically. Throws RowOutOfImage if a row leaves the
// right sensor.
MatchResult match_stereo(const std::vector<RayHit>& hits, const GrayImage& right_image,
                         const RingCenter& right_center, const StereoRig& rig,
                         const MatchParams& params = {});

struct RingPoint {
    double angle = 0.0;
    Point3 p{};                // left-camera frame (m)
    double radius_mm = 0.0;    // distance from the ring's own axis point
    double deviation_mm = std::numeric_limits<double>::quiet_NaN(); // bound by the map
    Rgb color{255, 0, 255};    // sentinel until colorized
    unsigned flags = 0;
};

struct RingProfile {
    int ring_index = 0;
    double axial_position_m = 0.0;
    int angular_samples = 0; // rays per revolution this ring was sampled at
    std::vector<RingPoint> points;
};

// Triangulates every correspondence and measures radii against the ring's
// own best-fit axis point (plane fit + algebraic circle fit), which keeps
// metric radii decoupled from image-space center error and lateral camera
// offset. Throws DegenerateRing for <3 or collinear points.
RingProfile compute_ring(const std::vector<MatchedHit>& matches, const StereoRig& rig,
                         int ring_index, double axial_position_m, int angular_samples);

// Samples the RGB frame at each point's projection. rgb_cam extrinsics are
// relative to the left IR camera. Points projecting outside the frame keep
// the sentinel color and are flagged; geometry is never modified.
void colorize_ring(RingProfile& ring, const RgbImage& rgb, const CameraModel& rgb_cam);

// Small-angle alternative to the full projection (scale + offset per axis),
// valid near the image center for a translation-mounted color camera.
struct AffineProjection {
    double sx = 0.0, sy = 0.0;
    double cx = 0.0, cy = 0.0;

    PixelPoint apply(const Point3& p) const { return {sx * p.x + cx, sy * p.y + cy}; }
    static AffineProjection from_model(const CameraModel& cam, double depth);
};

struct TiltEstimate {
    double pitch = 0.0;
    double yaw = 0.0;
    double depth_a = 0.0; // the two feature depths the estimate is based on
    double depth_b = 0.0;
};

// Orientation from two stereo feature depths: yaw from a horizontally
// separated pair, pitch from a vertically separated one (the dominant
// separation axis decides). Throws DegenerateBaseline below the pixel
// separation floor.
TiltEstimate estimate_tilt(PixelPoint pixel_a, double depth_a, PixelPoint pixel_b, double depth_b,
                           const StereoRig& rig, double min_separation_px = 20.0);

// Sub-pixel intensity peak along a row (log-quadratic refinement of the
// brightest sample); empty when nothing in the window clears the floor.
std::optional<double> row_peak_subpixel(const GrayImage& image, double y, double x_lo, double x_hi,
                                        double intensity_floor);

} // namespace pipescan
