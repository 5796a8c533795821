#include "pipescan/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pipescan/parallel.hpp"
#include "pipescan/rng.hpp"

namespace pipescan {

namespace {

constexpr double kTwoPi = 6.283185307179586;

double wrap_pi(double a) {
    a = std::fmod(a + 3.0 * kTwoPi + kTwoPi / 2.0, kTwoPi);
    return a - kTwoPi / 2.0; // (-pi, pi]
}

double wrap_2pi(double a) {
    a = std::fmod(a, kTwoPi);
    return a < 0.0 ? a + kTwoPi : a;
}

// Raised-cosine taper: 1 at s=0, 0 at |s|>=1, continuously differentiable.
double taper(double s) {
    s = std::abs(s);
    if (s >= 1.0) return 0.0;
    return 0.5 * (1.0 + std::cos(3.141592653589793 * s));
}

// Smooth deterministic radius field for rough (corroded) walls: a fixed
// table of low-order harmonics derived from the seed, normalized so the
// total amplitude equals roughness_amplitude.
struct RoughnessField {
    struct Term {
        double amp, n_theta, phase_theta, k_axial, phase_axial;
    };
    std::array<Term, 6> terms{};

    static RoughnessField make(double amplitude, std::uint32_t seed) {
        RoughnessField f;
        double weight_sum = 0.0;
        std::array<double, 6> w{};
        for (int i = 0; i < 6; ++i) {
            const std::uint64_t k = hash_combine(seed, static_cast<std::uint64_t>(i));
            w[i] = 0.5 + hash_uniform(k);
            weight_sum += w[i];
        }
        for (int i = 0; i < 6; ++i) {
            const std::uint64_t k = hash_combine(seed, static_cast<std::uint64_t>(i));
            Term t;
            t.amp = amplitude * w[i] / weight_sum;
            t.n_theta = 2.0 + static_cast<double>(splitmix64(k ^ 1) % 6); // 2..7 lobes
            t.phase_theta = kTwoPi * hash_uniform(k ^ 2);
            const double wavelength = 0.08 + 0.3 * hash_uniform(k ^ 3); // m
            t.k_axial = kTwoPi / wavelength;
            t.phase_axial = kTwoPi * hash_uniform(k ^ 4);
            f.terms[i] = t;
        }
        return f;
    }

    double eval(double axial, double angle) const {
        double d = 0.0;
        for (const Term& t : terms)
            d += t.amp * std::cos(t.n_theta * angle + t.phase_theta) *
                 std::cos(t.k_axial * axial + t.phase_axial);
        return d;
    }
};

} // namespace

void DefectSpec::validate(double pipe_radius) const {
    if (!(axial_extent > 0.0) || !(angular_extent > 0.0))
        raise(ErrorKind::InvalidArgument, "defect extents must be positive");
    if (magnitude == 0.0) raise(ErrorKind::InvalidArgument, "defect magnitude must be nonzero");
    if (!(std::abs(magnitude) < pipe_radius))
        raise(ErrorKind::InvalidArgument, "defect magnitude exceeds pipe radius");
}

Rgb WallTexture::sample(double axial, double angle) const {
    switch (kind) {
        case Kind::uniform:
            return base;
        case Kind::stripe:
            return std::abs(wrap_pi(angle - stripe_angle)) <= stripe_halfwidth ? accent : base;
        case Kind::checker: {
            const long long u = static_cast<long long>(std::floor(axial / checker_axial));
            const long long v = static_cast<long long>(std::floor(wrap_2pi(angle) / checker_angular));
            return ((u + v) & 1) ? base_alt : base;
        }
    }
    return base;
}

double PipeSpec::deviation_at(double axial, double angle) const {
    double dev = 0.0;
    for (const DefectSpec& d : defects) {
        const double sa = (axial - d.axial_center) / d.axial_extent;
        if (std::abs(sa) >= 1.0) continue;
        switch (d.kind) {
            case DefectKind::protrusion:
            case DefectKind::hole: {
                const double st = wrap_pi(angle - d.angular_center) / d.angular_extent;
                const double w = taper(sa) * taper(st);
                dev += (d.kind == DefectKind::protrusion ? -d.magnitude : d.magnitude) * w;
                break;
            }
            case DefectKind::ovality_patch:
                // Two-lobed cross-section blend, full magnitude at the
                // axial center, fading to circular at the footprint edge.
                dev += d.magnitude * std::cos(2.0 * (angle - d.angular_center)) * taper(sa);
                break;
        }
    }
    if (roughness_amplitude > 0.0) {
        static thread_local RoughnessField field;
        static thread_local double cached_amp = -1.0;
        static thread_local std::uint32_t cached_seed = 0;
        if (cached_amp != roughness_amplitude || cached_seed != roughness_seed) {
            field = RoughnessField::make(roughness_amplitude, roughness_seed);
            cached_amp = roughness_amplitude;
            cached_seed = roughness_seed;
        }
        dev += field.eval(axial, angle);
    }
    return dev;
}

void PipeSpec::validate() const {
    if (!(nominal_diameter > 0.0) || !(length > 0.0))
        raise(ErrorKind::InvalidArgument, "pipe dimensions must be positive");
    for (const DefectSpec& d : defects) {
        d.validate(nominal_radius());
        if (d.axial_center < 0.0 || d.axial_center > length)
            raise(ErrorKind::InvalidArgument, "defect lies outside the pipe");
    }
}

void LaserPlane::validate() const {
    if (!(offset > 0.0)) raise(ErrorKind::InvalidArgument, "laser plane offset must be positive");
    if (!(sigma_px > 0.0)) raise(ErrorKind::InvalidArgument, "laser sigma must be positive");
}

CameraPose scan_camera_pose(const ScanPose& pose, const Point3& offset_cam) {
    const Mat3 cam_to_world = Mat3::rot_y(pose.yaw) * Mat3::rot_x(pose.pitch);
    const Point3 base_center{pose.lateral_x, pose.lateral_y, pose.axial};
    const Point3 center = base_center + cam_to_world * offset_cam;
    CameraPose p;
    p.r = cam_to_world.transposed();
    p.t = (p.r * center) * -1.0;
    return p;
}

CameraModel posed_camera(const CameraModel& unposed, const ScanPose& pose, const Point3& relative) {
    CameraModel cam = unposed;
    cam.pose = scan_camera_pose(pose, relative);
    return cam;
}

namespace {

struct WorldRing {
    std::vector<double> angle;
    std::vector<Point3> world;
    std::vector<double> radius;
};

WorldRing solve_ring_world(const PipeSpec& pipe, const ScanPose& pose, const LaserPlane& plane,
                           int n_samples) {
    if (n_samples < 3) raise(ErrorKind::InvalidArgument, "need at least 3 ring samples");

    // Containment: the camera axis must stay inside the (possibly deformed)
    // bore with some margin.
    double min_r = pipe.nominal_radius();
    for (int i = 0; i < 32; ++i)
        min_r = std::min(min_r, pipe.radius_at(pose.axial, kTwoPi * i / 32.0));
    if (std::hypot(pose.lateral_x, pose.lateral_y) > min_r - 0.01)
        raise(ErrorKind::OutOfBore, "camera axis too close to the pipe wall");

    const CameraPose wc = scan_camera_pose(pose);
    const Point3 forward = wc.r.row(2); // camera z axis in world coordinates
    if (!(forward.z > 0.5)) raise(ErrorKind::OutOfBore, "camera tilted away from the pipe axis");
    const Point3 center{pose.lateral_x, pose.lateral_y, pose.axial};
    const double c0 = plane.offset + dot(forward, center);

    WorldRing ring;
    ring.angle.resize(n_samples);
    ring.world.resize(n_samples);
    ring.radius.resize(n_samples);
    for (int k = 0; k < n_samples; ++k) {
        const double theta = kTwoPi * k / n_samples;
        const double cs = std::cos(theta), sn = std::sin(theta);
        double r = pipe.nominal_radius();
        double axial = 0.0;
        for (int it = 0; it < 8; ++it) {
            axial = (c0 - r * (forward.x * cs + forward.y * sn)) / forward.z;
            r = pipe.radius_at(axial, theta);
        }
        if (axial < 0.0 || axial > pipe.length)
            raise(ErrorKind::OutOfBore, "laser plane exits the pipe");
        ring.angle[k] = theta;
        ring.world[k] = {r * cs, r * sn, axial};
        ring.radius[k] = r;
    }
    return ring;
}

// Smooth periodic radial jitter of the rendered line, one curve per
// camera/frame stream. Control points come from the counter-based RNG, so
// renders stay reproducible under any execution order.
struct JitterCurve {
    static constexpr int kControls = 64;
    std::array<double, kControls> ctrl{};

    static JitterCurve make(double sigma, std::uint64_t key) {
        JitterCurve j;
        for (int i = 0; i < kControls; ++i)
            j.ctrl[i] = sigma * hash_normal(hash_combine(key, 0x6a09e667f3bcc909ULL + i));
        return j;
    }

    double eval(double theta) const {
        const double s = wrap_2pi(theta) / kTwoPi * kControls;
        const int i1 = static_cast<int>(std::floor(s)) % kControls;
        const double t = s - std::floor(s);
        const int i0 = (i1 + kControls - 1) % kControls;
        const int i2 = (i1 + 1) % kControls;
        const int i3 = (i1 + 2) % kControls;
        const double p0 = ctrl[i0], p1 = ctrl[i1], p2 = ctrl[i2], p3 = ctrl[i3];
        return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                              t * (3.0 * (p1 - p2) + p3 - p0)));
    }
};

struct Seg {
    double x0, y0, x1, y1;
    float peak;
};

inline void stamp_segment_row(FloatImage& img, int y, const Seg& s, double cutoff, double inv2s2) {
    const double lo = std::min(s.x0, s.x1) - cutoff;
    const double hi = std::max(s.x0, s.x1) + cutoff;
    const int x_lo = std::max(0, static_cast<int>(std::floor(lo)));
    const int x_hi = std::min(img.width - 1, static_cast<int>(std::ceil(hi)));
    if (x_lo > x_hi) return;
    const double dx = s.x1 - s.x0;
    const double dy = s.y1 - s.y0;
    const double len2 = dx * dx + dy * dy;
    const double cutoff2 = cutoff * cutoff;
    for (int x = x_lo; x <= x_hi; ++x) {
        const double px = x - s.x0;
        const double py = y - s.y0;
        double t = len2 > 0.0 ? (px * dx + py * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double ex = px - t * dx;
        const double ey = py - t * dy;
        const double d2 = ex * ex + ey * ey;
        if (d2 > cutoff2) continue;
        const float v = s.peak * static_cast<float>(std::exp(-d2 * inv2s2));
        float& ref = img.ref(x, y);
        ref = std::max(ref, v);
    }
}

std::vector<Seg> curve_segments(const std::vector<CurveVertex>& verts, bool closed) {
    std::vector<Seg> segs;
    if (verts.size() < 2) return segs;
    const std::size_t n = verts.size();
    const std::size_t count = closed ? n : n - 1;
    segs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const CurveVertex& a = verts[i];
        const CurveVertex& b = verts[(i + 1) % n];
        segs.push_back({a.x, a.y, b.x, b.y, 0.5f * (a.peak + b.peak)});
    }
    return segs;
}

} // namespace

void render_curve_serial(FloatImage& img, const std::vector<CurveVertex>& verts, double sigma,
                         bool closed) {
    const double cutoff = 4.0 * sigma;
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for (const Seg& s : curve_segments(verts, closed)) {
        const int y_lo = std::max(0, static_cast<int>(std::floor(std::min(s.y0, s.y1) - cutoff)));
        const int y_hi =
            std::min(img.height - 1, static_cast<int>(std::ceil(std::max(s.y0, s.y1) + cutoff)));
        for (int y = y_lo; y <= y_hi; ++y) stamp_segment_row(img, y, s, cutoff, inv2s2);
    }
}

void render_curve_omp(FloatImage& img, const std::vector<CurveVertex>& verts, double sigma,
                      bool closed) {
    const double cutoff = 4.0 * sigma;
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const std::vector<Seg> segs = curve_segments(verts, closed);

    // Bucket segments by the rows they touch so each row is written by
    // exactly one thread.
    std::vector<std::vector<int>> buckets(img.height);
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const Seg& s = segs[i];
        const int y_lo = std::max(0, static_cast<int>(std::floor(std::min(s.y0, s.y1) - cutoff)));
        const int y_hi =
            std::min(img.height - 1, static_cast<int>(std::ceil(std::max(s.y0, s.y1) + cutoff)));
        for (int y = y_lo; y <= y_hi; ++y) buckets[y].push_back(static_cast<int>(i));
    }

#pragma omp parallel for schedule(dynamic, 8)
    for (int y = 0; y < img.height; ++y)
        for (const int i : buckets[y]) stamp_segment_row(img, y, segs[i], cutoff, inv2s2);
}

namespace {

void stamp_blob(FloatImage& img, double cx, double cy, float peak, double sigma) {
    const double cutoff = 4.0 * sigma;
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const int x_lo = std::max(0, static_cast<int>(std::floor(cx - cutoff)));
    const int x_hi = std::min(img.width - 1, static_cast<int>(std::ceil(cx + cutoff)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(cy - cutoff)));
    const int y_hi = std::min(img.height - 1, static_cast<int>(std::ceil(cy + cutoff)));
    for (int y = y_lo; y <= y_hi; ++y)
        for (int x = x_lo; x <= x_hi; ++x) {
            const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            const float v = peak * static_cast<float>(std::exp(-d2 * inv2s2));
            float& ref = img.ref(x, y);
            ref = std::max(ref, v);
        }
}

inline std::uint8_t finalize_pixel(float acc, double pixel_sigma, std::uint64_t key,
                                   std::size_t idx) {
    double v = acc;
    if (pixel_sigma > 0.0) v += pixel_sigma * hash_normal(hash_combine(key, idx));
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

} // namespace

void finalize_frame_serial(const FloatImage& acc, double pixel_sigma, std::uint64_t key,
                           GrayImage& out) {
    out = GrayImage(acc.width, acc.height);
    for (std::size_t i = 0; i < acc.data.size(); ++i)
        out.data[i] = finalize_pixel(acc.data[i], pixel_sigma, key, i);
}

void finalize_frame_omp(const FloatImage& acc, double pixel_sigma, std::uint64_t key,
                        GrayImage& out) {
    out = GrayImage(acc.width, acc.height);
    const long long n = static_cast<long long>(acc.data.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i)
        out.data[i] = finalize_pixel(acc.data[i], pixel_sigma, key, static_cast<std::size_t>(i));
}

std::vector<RingSample> ring_ground_truth(const PipeSpec& pipe, const ScanPose& pose,
                                          const LaserPlane& plane, int n_samples) {
    const WorldRing ring = solve_ring_world(pipe, pose, plane, n_samples);
    const CameraPose wc = scan_camera_pose(pose);
    std::vector<RingSample> out(ring.angle.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = {ring.angle[i], wc.r * ring.world[i] + wc.t, ring.radius[i]};
    return out;
}

GrayImage render_ir_frame(const PipeSpec& pipe, const ScanPose& pose, const LaserPlane& plane,
                          const CameraModel& cam, const NoiseParams& noise,
                          std::uint64_t stream_key, const std::vector<IrMarker>& markers) {
    cam.intrinsics.validate();
    const int n_dense = 4096;
    FloatImage acc(cam.intrinsics.width, cam.intrinsics.height);

    if (plane.power > 0.0) {
        const WorldRing ring = solve_ring_world(pipe, pose, plane, n_dense);
        std::vector<CurveVertex> verts(n_dense);
        for (int i = 0; i < n_dense; ++i) {
            const PixelPoint p = project_point(ring.world[i], cam);
            const double atten = 1.0 - plane.attenuation * (1.0 - std::cos(ring.angle[i])) * 0.5;
            verts[i] = {p.x, p.y, static_cast<float>(255.0 * plane.power * atten)};
        }
        if (noise.jitter_px > 0.0) {
            const JitterCurve jitter =
                JitterCurve::make(noise.jitter_px, hash_combine(noise.seed, stream_key));
            std::vector<CurveVertex> displaced = verts;
            for (int i = 0; i < n_dense; ++i) {
                const CurveVertex& prev = verts[(i + n_dense - 1) % n_dense];
                const CurveVertex& next = verts[(i + 1) % n_dense];
                double nx = next.y - prev.y;
                double ny = -(next.x - prev.x);
                const double len = std::hypot(nx, ny);
                if (len < 1e-12) continue;
                const double j = jitter.eval(ring.angle[i]);
                displaced[i].x += nx / len * j;
                displaced[i].y += ny / len * j;
            }
            verts.swap(displaced);
        }
        if (parallel_enabled())
            render_curve_omp(acc, verts, plane.sigma_px, true);
        else
            render_curve_serial(acc, verts, plane.sigma_px, true);
    }

    for (const IrMarker& m : markers) {
        const double r = pipe.radius_at(m.axial, m.angle);
        const Point3 world{r * std::cos(m.angle), r * std::sin(m.angle), m.axial};
        try {
            const PixelPoint p = project_point(world, cam);
            stamp_blob(acc, p.x, p.y, static_cast<float>(m.intensity), m.sigma_px);
        } catch (const Error&) {
            // marker behind the camera; simply not visible
        }
    }

    GrayImage out;
    if (parallel_enabled())
        finalize_frame_omp(acc, noise.pixel_sigma, hash_combine(noise.seed, stream_key ^ 0x51ed2701ULL), out);
    else
        finalize_frame_serial(acc, noise.pixel_sigma, hash_combine(noise.seed, stream_key ^ 0x51ed2701ULL), out);
    return out;
}

namespace {

// The wall is rendered as an infinite cylinder so the view down the bore has
// no artificial end cap; defects and the ring solver stay bounded by length.
inline Rgb rgb_ray_pixel(const PipeSpec& pipe, const Mat3& cam_to_world, const Point3& center,
                         const CameraIntrinsics& k, const DistortionCoeffs& dist, int u, int v) {
    const double ynd = (v - k.cy) / k.fy;
    const double xnd = (u - k.cx - k.skew * ynd) / k.fx;
    PixelPoint n{xnd, ynd};
    if (!dist.is_zero()) {
        try {
            n = undistort_point(n, dist);
        } catch (const Error&) {
            return {0, 0, 0};
        }
    }
    const Point3 dir = cam_to_world * Point3{n.x, n.y, 1.0};
    const double a = dir.x * dir.x + dir.y * dir.y;
    if (a < 1e-16) return {0, 0, 0};
    const double radius = pipe.nominal_radius();
    const double b = 2.0 * (center.x * dir.x + center.y * dir.y);
    const double c = center.x * center.x + center.y * center.y - radius * radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) return {0, 0, 0};
    const double t = (-b + std::sqrt(disc)) / (2.0 * a);
    if (t <= 0.0) return {0, 0, 0};
    const Point3 hit = center + dir * t;
    return pipe.texture.sample(hit.z, std::atan2(hit.y, hit.x));
}

} // namespace

void raycast_rgb_serial(const PipeSpec& pipe, const CameraModel& cam, RgbImage& out) {
    out = RgbImage(cam.intrinsics.width, cam.intrinsics.height);
    const Mat3 cam_to_world = cam.pose.r.transposed();
    const Point3 center = cam.center_world();
    for (int v = 0; v < out.height; ++v)
        for (int u = 0; u < out.width; ++u)
            out.set(u, v, rgb_ray_pixel(pipe, cam_to_world, center, cam.intrinsics, cam.distortion, u, v));
}

void raycast_rgb_omp(const PipeSpec& pipe, const CameraModel& cam, RgbImage& out) {
    out = RgbImage(cam.intrinsics.width, cam.intrinsics.height);
    const Mat3 cam_to_world = cam.pose.r.transposed();
    const Point3 center = cam.center_world();
#pragma omp parallel for schedule(static)
    for (int v = 0; v < out.height; ++v)
        for (int u = 0; u < out.width; ++u)
            out.set(u, v, rgb_ray_pixel(pipe, cam_to_world, center, cam.intrinsics, cam.distortion, u, v));
}

RgbImage render_rgb_frame(const PipeSpec& pipe, const ScanPose& pose, const CameraModel& cam) {
    cam.intrinsics.validate();
    (void)pose; // pose is already baked into the camera model
    RgbImage out;
    if (parallel_enabled())
        raycast_rgb_omp(pipe, cam, out);
    else
        raycast_rgb_serial(pipe, cam, out);
    return out;
}

void simulate_scan(const PipeSpec& pipe, const std::vector<ScanPose>& trajectory,
                   const StereoRig& rig, const CameraModel& rgb_relative, const LaserPlane& plane,
                   const WheelSpec& wheel, const NoiseParams& noise, const SimOptions& options,
                   const std::function<void(FrameBundle&&)>& sink) {
    pipe.validate();
    plane.validate();
    rig.validate();
    rgb_relative.intrinsics.validate();
    wheel.validate();
    for (std::size_t i = 1; i < trajectory.size(); ++i)
        if (!(trajectory[i].axial > trajectory[i - 1].axial))
            raise(ErrorKind::InvalidArgument, "trajectory must be strictly increasing in axial position");

    const Point3 rgb_center = rgb_relative.center_world(); // mount offset in the left-IR frame

    for (std::size_t i = 0; i < trajectory.size(); ++i) {
        const ScanPose& pose = trajectory[i];
        FrameBundle bundle;
        bundle.index = static_cast<int>(i);
        bundle.pose_truth = pose;
        bundle.ring_truth = ring_ground_truth(pipe, pose, plane, options.truth_samples);
        bundle.left_ir = render_ir_frame(pipe, pose, plane, posed_camera(rig.left, pose), noise,
                                         hash_combine(i, 1), options.markers);
        bundle.right_ir =
            render_ir_frame(pipe, pose, plane, posed_camera(rig.right, pose, {rig.baseline, 0.0, 0.0}),
                            noise, hash_combine(i, 2), options.markers);
        bundle.rgb = render_rgb_frame(pipe, pose, posed_camera(rgb_relative, pose, rgb_center));
        bundle.encoder_ticks = encoder_ticks_for(pose.axial, wheel);
        sink(std::move(bundle));
    }
}

} // namespace pipescan
