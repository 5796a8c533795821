#include "pipescan/geometry.hpp"

#include <cmath>

namespace pipescan {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::BehindCamera: return "BehindCamera";
        case ErrorKind::NotRectified: return "NotRectified";
        case ErrorKind::ZeroDisparity: return "ZeroDisparity";
        case ErrorKind::OutOfBore: return "OutOfBore";
        case ErrorKind::EmptyMask: return "EmptyMask";
        case ErrorKind::NoCircle: return "NoCircle";
        case ErrorKind::TooSparse: return "TooSparse";
        case ErrorKind::RowOutOfImage: return "RowOutOfImage";
        case ErrorKind::DegenerateRing: return "DegenerateRing";
        case ErrorKind::DegenerateBaseline: return "DegenerateBaseline";
        case ErrorKind::NonMonotoneOdometry: return "NonMonotoneOdometry";
        case ErrorKind::AngularMismatch: return "AngularMismatch";
        case ErrorKind::IoFailure: return "IoFailure";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Error";
}

Mat3 Mat3::rot_x(double a) {
    Mat3 r;
    const double c = std::cos(a), s = std::sin(a);
    r.m[1][1] = c; r.m[1][2] = -s;
    r.m[2][1] = s; r.m[2][2] = c;
    return r;
}

Mat3 Mat3::rot_y(double a) {
    Mat3 r;
    const double c = std::cos(a), s = std::sin(a);
    r.m[0][0] = c; r.m[0][2] = s;
    r.m[2][0] = -s; r.m[2][2] = c;
    return r;
}

Mat3 Mat3::rot_z(double a) {
    Mat3 r;
    const double c = std::cos(a), s = std::sin(a);
    r.m[0][0] = c; r.m[0][1] = -s;
    r.m[1][0] = s; r.m[1][1] = c;
    return r;
}

Mat3 Mat3::transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
}

Point3 Mat3::operator*(const Point3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

Mat3 Mat3::operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
            r.m[i][j] = s;
        }
    return r;
}

DistortionCoeffs DistortionCoeffs::make(double k1, double k2, double k3, double fov_radius) {
    if (!(fov_radius > 0.0) || !std::isfinite(k1) || !std::isfinite(k2) || !std::isfinite(k3))
        raise(ErrorKind::InvalidArgument, "bad distortion coefficients");
    DistortionCoeffs d{k1, k2, k3, fov_radius};
    // d/dr [ r * scale(r^2) ] = 1 + 3 k1 r^2 + 5 k2 r^4 + 7 k3 r^6 must stay
    // positive out to fov_radius; sampled densely, which is ample for a
    // cubic in r^2.
    for (int i = 0; i <= 2048; ++i) {
        const double r = fov_radius * static_cast<double>(i) / 2048.0;
        const double r2 = r * r;
        const double deriv = 1.0 + r2 * (3.0 * k1 + r2 * (5.0 * k2 + r2 * 7.0 * k3));
        if (!(deriv > 0.0))
            raise(ErrorKind::InvalidArgument,
                  "distortion model not monotone at r=" + std::to_string(r));
    }
    return d;
}

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0) || width <= 0 || height <= 0)
        raise(ErrorKind::InvalidArgument, "invalid camera intrinsics");
}

void CameraPose::validate() const {
    const Mat3 rtr = r.transposed() * r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(rtr.m[i][j] - want) > 1e-9)
                raise(ErrorKind::InvalidArgument, "rotation is not orthonormal");
        }
    const double det = dot(r.row(0), cross(r.row(1), r.row(2)));
    if (std::abs(det - 1.0) > 1e-9)
        raise(ErrorKind::InvalidArgument, "rotation determinant is not +1");
}

CameraModel CameraModel::pinhole() const {
    CameraModel c = *this;
    c.distortion = DistortionCoeffs{0.0, 0.0, 0.0, distortion.fov_radius};
    return c;
}

Point3 CameraModel::center_world() const {
    // p_cam = R p + t = 0  =>  center = -R^T t
    return pose.r.transposed() * (pose.t * -1.0);
}

void StereoRig::validate() const {
    if (!(baseline > 0.0)) raise(ErrorKind::InvalidArgument, "baseline must be positive");
    left.intrinsics.validate();
    right.intrinsics.validate();
    if (rectified) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (std::abs(left.pose.r.m[i][j] - right.pose.r.m[i][j]) > 1e-9)
                    raise(ErrorKind::InvalidArgument, "rectified rig requires equal rotations");
        // Right center must sit at left center + baseline along camera x.
        const Point3 delta = right.center_world() - left.center_world();
        const Point3 cam_delta = left.pose.r * delta;
        if (std::abs(cam_delta.x - baseline) > 1e-9 || std::abs(cam_delta.y) > 1e-9 ||
            std::abs(cam_delta.z) > 1e-9)
            raise(ErrorKind::InvalidArgument, "rectified rig baseline must be pure camera-x");
    }
}

PixelPoint distort_point(PixelPoint p, const DistortionCoeffs& d) {
    const double r2 = p.x * p.x + p.y * p.y;
    const double s = d.radial_scale(r2);
    return {p.x * s, p.y * s};
}

PixelPoint undistort_point(PixelPoint p, const DistortionCoeffs& d) {
    if (d.is_zero()) return p;
    PixelPoint x = p;
    for (int it = 0; it < 50; ++it) {
        const double r2 = x.x * x.x + x.y * x.y;
        const double s = d.radial_scale(r2);
        if (!(s > 0.0)) break;
        const PixelPoint next{p.x / s, p.y / s};
        const double step = std::hypot(next.x - x.x, next.y - x.y);
        x = next;
        if (step < 1e-12) {
            // Guard against a converged-but-wrong fixed point outside the
            // monotone region.
            const PixelPoint rt = distort_point(x, d);
            if (std::hypot(rt.x - p.x, rt.y - p.y) < 1e-9) return x;
            break;
        }
    }
    raise(ErrorKind::NonConvergence, "undistort_point did not converge");
}

PixelPoint project_point(const Point3& world, const CameraModel& cam) {
    const Point3 pc = cam.pose.r * world + cam.pose.t;
    if (!(pc.z > 0.0)) raise(ErrorKind::BehindCamera, "point has non-positive depth");
    const PixelPoint n{pc.x / pc.z, pc.y / pc.z};
    const PixelPoint nd = distort_point(n, cam.distortion);
    const CameraIntrinsics& k = cam.intrinsics;
    return {k.fx * nd.x + k.skew * nd.y + k.cx, k.fy * nd.y + k.cy};
}

double epipolar_row(PixelPoint left, const StereoRig& rig) {
    if (!rig.rectified) raise(ErrorKind::NotRectified, "rig is not rectified");
    return left.y;
}

Point3 triangulate(PixelPoint left, PixelPoint right, const StereoRig& rig,
                   double disparity_floor_px) {
    if (!rig.rectified) raise(ErrorKind::NotRectified, "rig is not rectified");
    const CameraIntrinsics& kl = rig.left.intrinsics;
    const CameraIntrinsics& kr = rig.right.intrinsics;
    const double ynl = (left.y - kl.cy) / kl.fy;
    const double xnl = (left.x - kl.cx - kl.skew * ynl) / kl.fx;
    const double ynr = (right.y - kr.cy) / kr.fy;
    const double xnr = (right.x - kr.cx - kr.skew * ynr) / kr.fx;
    const double dn = xnl - xnr; // = baseline / Z
    if (!(dn * kl.fx > disparity_floor_px))
        raise(ErrorKind::ZeroDisparity, "disparity at or below floor");
    const double z = rig.baseline / dn;
    return {xnl * z, ynl * z, z};
}

Point3 back_project(PixelPoint px, double depth, const CameraIntrinsics& k) {
    const double yn = (px.y - k.cy) / k.fy;
    const double xn = (px.x - k.cx - k.skew * yn) / k.fx;
    return {xn * depth, yn * depth, depth};
}

} // namespace pipescan
