#pragma once

#include <cmath>

#include "pipescan/errors.hpp"

// Camera and stereo geometry for a rectified IR pair.
//
// Conventions used throughout:
//   - pixel origin at the top-left corner, x right, y down
//   - camera frame: x right, y down, z forward (optical axis)
//   - normalized image coordinates are (px - c) / f
//   - world frame: pipe axis along +z, cross-section in the x/y plane,
//     so an untilted camera frame is axis-aligned with the world

namespace pipescan {

struct PixelPoint {
    double x = 0.0;
    double y = 0.0;
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Point3 cross(const Point3& a, const Point3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }

struct Mat3 {
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    static Mat3 identity() { return {}; }
    static Mat3 rot_x(double a);
    static Mat3 rot_y(double a);
    static Mat3 rot_z(double a);

    Mat3 transposed() const;
    Point3 operator*(const Point3& v) const;
    Mat3 operator*(const Mat3& o) const;
    Point3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }
    Point3 col(int j) const { return {m[0][j], m[1][j], m[2][j]}; }
};

// Radial distortion, truncated at the third coefficient. The forward model
// must stay monotone in radius out to fov_radius (normalized units) so that
// the inverse is well defined; make() enforces this.
struct DistortionCoeffs {
    double k1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;
    double fov_radius = 1.5;

    static DistortionCoeffs make(double k1, double k2, double k3, double fov_radius = 1.5);

    bool is_zero() const { return k1 == 0.0 && k2 == 0.0 && k3 == 0.0; }
    double radial_scale(double r2) const { return 1.0 + r2 * (k1 + r2 * (k2 + r2 * k3)); }
};

struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    double skew = 0.0;
    int width = 0;
    int height = 0;

    void validate() const;
};

// World-to-camera transform: p_cam = r * p_world + t.
struct CameraPose {
    Mat3 r;
    Point3 t;

    static CameraPose identity() { return {}; }
    void validate() const; // r orthonormal with det +1
};

struct CameraModel {
    CameraIntrinsics intrinsics;
    DistortionCoeffs distortion;
    CameraPose pose;

    CameraModel pinhole() const; // same model with distortion zeroed
    Point3 center_world() const; // camera center in world coordinates
};

struct StereoRig {
    CameraModel left;
    CameraModel right;
    double baseline = 0.0; // separation of focal points (m)
    bool rectified = true;

    void validate() const;
};

// Eq-style forward distortion on normalized coordinates:
//   (x, y) -> (x, y) * (1 + k1 r^2 + k2 r^4 + k3 r^6),  r^2 = x^2 + y^2
PixelPoint distort_point(PixelPoint normalized, const DistortionCoeffs& d);

// Inverse of distort_point by damped fixed-point iteration
// x <- p / (1 + k1 r^2 + ...); 50 iterations max, 1e-12 step tolerance.
// Throws NonConvergence outside the monotone region.
PixelPoint undistort_point(PixelPoint normalized, const DistortionCoeffs& d);

// Full projection: extrinsics, perspective division, distortion, intrinsics.
// Throws BehindCamera when the transformed depth is <= 0.
PixelPoint project_point(const Point3& world, const CameraModel& cam);

// Row on which the match of a left-image point must lie; identical to the
// left row in a rectified rig. Throws NotRectified otherwise.
double epipolar_row(PixelPoint left, const StereoRig& rig);

// Triangulation of a rectified correspondence into the left-camera frame.
// Pixel coordinates are taken center-relative and focal-scaled, so for equal
// intrinsics this is Z = f*T/d, X = x_l*T/d, Y = y_l*T/d exactly.
// Throws ZeroDisparity when the disparity is at or below disparity_floor_px.
Point3 triangulate(PixelPoint left, PixelPoint right, const StereoRig& rig,
                   double disparity_floor_px = 0.5);

// Pinhole back-projection of an undistorted pixel to a camera-frame point at
// the given depth.
Point3 back_project(PixelPoint px, double depth, const CameraIntrinsics& k);

} // namespace pipescan
