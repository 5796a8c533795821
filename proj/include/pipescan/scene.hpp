#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pipescan/geometry.hpp"
#include "pipescan/image.hpp"
#include "pipescan/odometry.hpp"

// Synthetic ground truth: a pipe with planted defects, a ring projector
// rigidly mounted ahead of the left camera, and renderers for the stereo IR
// pair and the RGB camera.

namespace pipescan {

enum class DefectKind { protrusion, hole, ovality_patch };

struct DefectSpec {
    DefectKind kind = DefectKind::protrusion;
    double axial_center = 0.0;    // m along the pipe
    double angular_center = 0.0;  // rad around the circumference
    double axial_extent = 0.05;   // m, half-extent of the footprint
    double angular_extent = 0.4;  // rad, half-extent
    double magnitude = 0.003;     // m; protrusions shrink the radius, holes grow it

    void validate(double pipe_radius) const;
};

struct WallTexture {
    enum class Kind { uniform, stripe, checker };
    Kind kind = Kind::uniform;
    Rgb base{120, 120, 120};
    Rgb base_alt{96, 96, 96};
    Rgb accent{200, 40, 40};
    double stripe_angle = 0.0;      // rad
    double stripe_halfwidth = 0.15; // rad
    double checker_axial = 0.1;     // m per cell
    double checker_angular = 0.5235987755982988; // rad per cell

    Rgb sample(double axial, double angle) const;
};

struct PipeSpec {
    double nominal_diameter = 0.3; // m
    double length = 1.0;           // m
    std::vector<DefectSpec> defects;
    WallTexture texture;
    double roughness_amplitude = 0.0; // m, smooth pseudo-random radius field
    std::uint32_t roughness_seed = 0;

    double nominal_radius() const { return nominal_diameter / 2.0; }
    // Signed radial deviation from the nominal radius (m) at a wall location.
    double deviation_at(double axial, double angle) const;
    double radius_at(double axial, double angle) const { return nominal_radius() + deviation_at(axial, angle); }
    void validate() const;
};

struct LaserPlane {
    double offset = 0.15;      // m ahead of the left camera center
    double sigma_px = 1.2;     // Gaussian cross-section of the rendered line
    double power = 1.0;        // peak scale, 0..1
    double attenuation = 0.3;  // angular intensity falloff depth, 0..1

    void validate() const;
};

// Camera carriage state along the scan. Lateral offsets displace the camera
// axis from the pipe axis within the cross-section (camera x = horizontal,
// camera y = vertical); pitch/yaw tilt the camera axis.
struct ScanPose {
    double axial = 0.0;
    double lateral_x = 0.0;
    double lateral_y = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;
};

// Small bright wall spot visible to both IR cameras; gives the stereo stage
// off-ring features for tilt estimation.
struct IrMarker {
    double axial = 0.0;
    double angle = 0.0;
    double intensity = 200.0;
    double sigma_px = 1.5;
};

struct NoiseParams {
    double pixel_sigma = 2.0; // additive intensity noise
    double jitter_px = 0.3;   // smooth radial jitter of the rendered line
    std::uint64_t seed = 12345;

    NoiseParams scaled(double f) const { return {pixel_sigma * f, jitter_px * f, seed}; }
};

struct RingSample {
    double angle = 0.0;  // pipe angular coordinate
    Point3 cam_point{};  // left-camera frame
    double radius = 0.0; // true wall radius at this sample (m)
};

// World-to-camera pose for the left IR camera at a scan pose; offset_cam
// displaces the camera center by that vector expressed in camera axes
// (baseline for the right camera, mount offset for the RGB camera).
CameraPose scan_camera_pose(const ScanPose& pose, const Point3& offset_cam = {});

// Positions an unposed camera model (identity pose, rig file contents) at a
// scan pose. relative = camera position in the left-IR frame.
CameraModel posed_camera(const CameraModel& unposed, const ScanPose& pose, const Point3& relative = {});

// Analytic laser-plane / pipe-surface intersection, n_samples uniform in
// pipe angle, points in the left-camera frame. Throws OutOfBore when the
// pose leaves the bore or the plane exits the pipe.
std::vector<RingSample> ring_ground_truth(const PipeSpec& pipe, const ScanPose& pose,
                                          const LaserPlane& plane, int n_samples);

// Renders the laser ring (plus any markers) seen by `cam`, which must be a
// posed model (see posed_camera). stream_key decorrelates the noise between
// cameras and frames while keeping renders bit-reproducible.
GrayImage render_ir_frame(const PipeSpec& pipe, const ScanPose& pose, const LaserPlane& plane,
                          const CameraModel& cam, const NoiseParams& noise,
                          std::uint64_t stream_key = 0,
                          const std::vector<IrMarker>& markers = {});

// Wall texture seen by the RGB camera; the ring is absent by construction
// (the IR filter rejects the laser wavelength entirely).
RgbImage render_rgb_frame(const PipeSpec& pipe, const ScanPose& pose, const CameraModel& cam);

struct FrameBundle {
    int index = 0;
    GrayImage left_ir;
    GrayImage right_ir;
    RgbImage rgb;
    ScanPose pose_truth;
    std::vector<RingSample> ring_truth;
    long long encoder_ticks = 0;
};

struct SimOptions {
    int truth_samples = 4096;
    std::vector<IrMarker> markers;
};

// One bundle per trajectory pose, delivered in order. rgb_relative holds the
// RGB camera intrinsics/distortion and its pose in the left-IR frame.
void simulate_scan(const PipeSpec& pipe, const std::vector<ScanPose>& trajectory,
                   const StereoRig& rig, const CameraModel& rgb_relative, const LaserPlane& plane,
                   const WheelSpec& wheel, const NoiseParams& noise, const SimOptions& options,
                   const std::function<void(FrameBundle&&)>& sink);

// Curve rasterization kernel (exposed for the benchmark): max-composites a
// Gaussian-profile polyline into a float buffer.
struct CurveVertex {
    double x = 0.0;
    double y = 0.0;
    float peak = 0.0f;
};
void render_curve_serial(FloatImage& img, const std::vector<CurveVertex>& verts, double sigma,
                         bool closed);
void render_curve_omp(FloatImage& img, const std::vector<CurveVertex>& verts, double sigma,
                      bool closed);

void finalize_frame_serial(const FloatImage& acc, double pixel_sigma, std::uint64_t key, GrayImage& out);
void finalize_frame_omp(const FloatImage& acc, double pixel_sigma, std::uint64_t key, GrayImage& out);

void raycast_rgb_serial(const PipeSpec& pipe, const CameraModel& cam, RgbImage& out);
void raycast_rgb_omp(const PipeSpec& pipe, const CameraModel& cam, RgbImage& out);

} // namespace pipescan
