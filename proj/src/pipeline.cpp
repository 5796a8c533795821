#include "pipescan/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pipescan/parallel.hpp"

namespace pipescan {

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Log-quadratic sub-pixel offset for three samples of a Gaussian profile at
// unit spacing; exact for a noiseless Gaussian of any width.
double log_parabola_offset(double im1, double i0, double ip1) {
    const double l0 = std::log(std::max(im1, 0.5));
    const double l1 = std::log(std::max(i0, 0.5));
    const double l2 = std::log(std::max(ip1, 0.5));
    const double denom = l0 - 2.0 * l1 + l2;
    if (std::abs(denom) < 1e-12) return 0.0;
    return std::clamp(0.5 * (l0 - l2) / denom, -1.0, 1.0);
}

struct RadialRefine {
    double t = 0.0;
    double intensity = 0.0;
    bool ok = false;
};

// Refines a ridge crossing along the ray (cx,cy)+t*(dx,dy): centers on the
// brightest integer offset nearby, then applies the log-quadratic fit.
RadialRefine refine_radial(const GrayImage& image, double cx, double cy, double dx, double dy,
                           double t_seed, double floor) {
    double best_t = t_seed;
    double best_i = -1.0;
    for (int k = -3; k <= 3; ++k) {
        const double t = std::round(t_seed) + k;
        const double x = cx + t * dx;
        const double y = cy + t * dy;
        if (x < 1 || y < 1 || x > image.width - 2 || y > image.height - 2) continue;
        const double v = sample_bicubic(image, x, y);
        if (v > best_i) {
            best_i = v;
            best_t = t;
        }
    }
    if (best_i < floor) return {};
    const auto probe = [&](double t) {
        return sample_bicubic(image, cx + t * dx, cy + t * dy);
    };
    const double x0 = cx + (best_t - 1) * dx, y0 = cy + (best_t - 1) * dy;
    const double x1 = cx + (best_t + 1) * dx, y1 = cy + (best_t + 1) * dy;
    if (x0 < 0 || y0 < 0 || x1 < 0 || y1 < 0 || x0 > image.width - 1 || x1 > image.width - 1 ||
        y0 > image.height - 1 || y1 > image.height - 1)
        return {best_t, best_i, true};
    const double offset = log_parabola_offset(probe(best_t - 1), best_i, probe(best_t + 1));
    return {best_t + offset, best_i, true};
}

struct HitSlot {
    RayHit hit{};
    bool ok = false;
};

inline bool mask_near(const BinaryMask& mask, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
            const int xx = x0 + dx, yy = y0 + dy;
            if (mask.in_bounds(xx, yy) && mask.at(xx, yy)) return true;
        }
    return false;
}

void cast_one_ray(const BinaryMask& mask, const GrayImage& image, const RingCenter& center,
                  int n_rays, int k, const RayCastParams& p, HitSlot& slot) {
    const double angle = kTwoPi * k / n_rays;
    const double dx = std::cos(angle);
    const double dy = std::sin(angle);
    const double t_lo = std::max(p.inner_start, center.r_est - p.march_margin);
    const double t_hi = center.r_est + p.march_margin;
    for (double t = t_lo; t <= t_hi; t += p.march_step) {
        const double x = center.cx + t * dx;
        const double y = center.cy + t * dy;
        if (x < 0 || y < 0 || x >= mask.width || y >= mask.height) return;
        if (!mask_near(mask, x, y)) continue;
        const RadialRefine r = refine_radial(image, center.cx, center.cy, dx, dy, t, p.intensity_floor);
        if (!r.ok) return;
        slot.hit = {angle, {center.cx + r.t * dx, center.cy + r.t * dy}, r.intensity};
        slot.ok = true;
        return;
    }
}

void collect_hits(const std::vector<HitSlot>& slots, RayCastResult& out) {
    out.hits.clear();
    out.missed_rays.clear();
    for (std::size_t k = 0; k < slots.size(); ++k) {
        if (slots[k].ok)
            out.hits.push_back(slots[k].hit);
        else
            out.missed_rays.push_back(static_cast<int>(k));
    }
}

} // namespace

void cast_rays_serial(const BinaryMask& mask, const GrayImage& image, const RingCenter& center,
                      int n_rays, const RayCastParams& params, RayCastResult& out) {
    std::vector<HitSlot> slots(n_rays);
    for (int k = 0; k < n_rays; ++k) cast_one_ray(mask, image, center, n_rays, k, params, slots[k]);
    out.n_rays = n_rays;
    collect_hits(slots, out);
}

void cast_rays_omp(const BinaryMask& mask, const GrayImage& image, const RingCenter& center,
                   int n_rays, const RayCastParams& params, RayCastResult& out) {
    std::vector<HitSlot> slots(n_rays);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n_rays; ++k) cast_one_ray(mask, image, center, n_rays, k, params, slots[k]);
    out.n_rays = n_rays;
    collect_hits(slots, out);
}

RayCastResult cast_rays(const BinaryMask& mask, const GrayImage& image, const RingCenter& center,
                        int n_rays, const RayCastParams& params) {
    if (n_rays < 1) raise(ErrorKind::InvalidArgument, "n_rays must be positive");
    RayCastResult out;
    if (parallel_enabled())
        cast_rays_omp(mask, image, center, n_rays, params, out);
    else
        cast_rays_serial(mask, image, center, n_rays, params, out);
    if (out.hits.size() < params.min_hit_fraction * n_rays)
        raise(ErrorKind::TooSparse, std::to_string(out.hits.size()) + " of " +
                                        std::to_string(n_rays) + " rays hit the ring");
    return out;
}

std::optional<double> row_peak_subpixel(const GrayImage& image, double y, double x_lo, double x_hi,
                                        double intensity_floor) {
    if (y < 0 || y > image.height - 1) return std::nullopt;
    const int lo = std::max(1, static_cast<int>(std::ceil(x_lo)));
    const int hi = std::min(image.width - 2, static_cast<int>(std::floor(x_hi)));
    if (lo > hi) return std::nullopt;
    int best_x = lo;
    double best_i = -1.0;
    for (int x = lo; x <= hi; ++x) {
        const double v = sample_bicubic(image, x, y);
        if (v > best_i) {
            best_i = v;
            best_x = x;
        }
    }
    if (best_i < intensity_floor) return std::nullopt;
    const double im1 = sample_bicubic(image, best_x - 1, y);
    const double ip1 = sample_bicubic(image, best_x + 1, y);
    return best_x + log_parabola_offset(im1, best_i, ip1);
}

namespace {

struct MatchSlot {
    MatchedHit m{};
    int state = 0; // 0 = no peak, 1 = matched, 2 = deferred to the model pass
};

// 3x3 least squares for the ring-plane disparity model
// 1/d = a + b cos(angle) + c sin(angle); exact for a planar ring.
struct DisparityModel {
    double a = 0.0, b = 0.0, c = 0.0;
    bool ok = false;

    double disparity(double angle) const {
        const double inv = a + b * std::cos(angle) + c * std::sin(angle);
        return inv > 1e-12 ? 1.0 / inv : 0.0;
    }
};

DisparityModel fit_disparity_model(const std::vector<MatchSlot>& slots, int min_points) {
    double s[3][3] = {};
    double rhs[3] = {};
    int n = 0;
    for (const MatchSlot& slot : slots) {
        if (slot.state != 1) continue;
        const double phi[3] = {1.0, std::cos(slot.m.angle), std::sin(slot.m.angle)};
        const double y = 1.0 / slot.m.corr.disparity;
        for (int i = 0; i < 3; ++i) {
            rhs[i] += phi[i] * y;
            for (int j = 0; j < 3; ++j) s[i][j] += phi[i] * phi[j];
        }
        ++n;
    }
    DisparityModel model;
    if (n < min_points) return model;
    // Gaussian elimination with partial pivoting on the 3x3 system.
    double aug[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) aug[i][j] = s[i][j];
        aug[i][3] = rhs[i];
    }
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
        if (std::abs(aug[pivot][col]) < 1e-12) return model;
        std::swap(aug[col], aug[pivot]);
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = aug[r][col] / aug[col][col];
            for (int j = col; j < 4; ++j) aug[r][j] -= f * aug[col][j];
        }
    }
    model.a = aug[0][3] / aug[0][0];
    model.b = aug[1][3] / aug[1][1];
    model.c = aug[2][3] / aug[2][2];
    model.ok = true;
    return model;
}

void match_one_hit(const RayHit& hit, const GrayImage& right, const RingCenter& rc,
                   const MatchParams& p, MatchSlot& slot) {
    const double y = hit.pixel.y;
    const double side = std::cos(hit.angle);
    if (std::abs(side) < p.tangent_cos) {
        slot.state = 2;
        return;
    }

    // Geometric candidate: where the row should cut the right ring on the
    // matching side of the right center.
    const double dy = y - rc.cy;
    const double under = rc.r_est * rc.r_est - dy * dy;
    double guess = rc.cx;
    if (under > 0.0) guess = rc.cx + (side > 0 ? 1.0 : -1.0) * std::sqrt(under);

    std::optional<double> x_r =
        row_peak_subpixel(right, y, guess - p.window_halfwidth, guess + p.window_halfwidth,
                          p.intensity_floor);
    if (!x_r) {
        // Wide fallback: the whole matching side of the row.
        const double margin = 3.0;
        if (side > 0)
            x_r = row_peak_subpixel(right, y, rc.cx + margin, right.width - 1.0, p.intensity_floor);
        else
            x_r = row_peak_subpixel(right, y, 0.0, rc.cx - margin, p.intensity_floor);
    }
    if (!x_r) return;
    if ((side > 0) != (*x_r > rc.cx)) return; // side-consistency
    const double d = hit.pixel.x - *x_r;
    if (d <= p.disparity_floor) return;
    slot.m.angle = hit.angle;
    slot.m.corr = {hit.pixel, {*x_r, y}, d};
    slot.m.intensity = hit.intensity;
    slot.state = 1;
}

} // namespace

MatchResult match_stereo(const std::vector<RayHit>& hits, const GrayImage& right_image,
                         const RingCenter& right_center, const StereoRig& rig,
                         const MatchParams& params) {
    if (!rig.rectified) raise(ErrorKind::NotRectified, "rig is not rectified");
    for (const RayHit& h : hits)
        if (h.pixel.y < 0 || h.pixel.y > right_image.height - 1)
            raise(ErrorKind::RowOutOfImage,
                  "epipolar row " + std::to_string(h.pixel.y) + " outside the right sensor");

    std::vector<MatchSlot> slots(hits.size());
    const long long n = static_cast<long long>(hits.size());
    if (parallel_enabled()) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i)
            match_one_hit(hits[i], right_image, right_center, params, slots[i]);
    } else {
        for (long long i = 0; i < n; ++i)
            match_one_hit(hits[i], right_image, right_center, params, slots[i]);
    }

    // Near-tangent hits: disparity from the ring-plane model, verified
    // against the right image before being accepted.
    const DisparityModel model = fit_disparity_model(slots, params.min_model_points);
    MatchResult out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        MatchSlot& slot = slots[i];
        if (slot.state == 2 && model.ok) {
            const RayHit& hit = hits[i];
            const double d = model.disparity(hit.angle);
            const double x_r = hit.pixel.x - d;
            if (d > params.disparity_floor && x_r >= 1 && x_r <= right_image.width - 2 &&
                sample_bicubic(right_image, x_r, hit.pixel.y) >= params.intensity_floor) {
                slot.m.angle = hit.angle;
                slot.m.corr = {hit.pixel, {x_r, hit.pixel.y}, d};
                slot.m.intensity = hit.intensity;
                slot.m.flags |= kFlagPredictedDisparity;
                slot.state = 1;
                ++out.predicted_count;
            } else {
                slot.state = 0;
            }
        } else if (slot.state == 2) {
            slot.state = 0;
        }
        if (slot.state == 1)
            out.matches.push_back(slot.m);
        else
            ++out.no_peak_count;
    }
    return out;
}

namespace {

// Jacobi eigensolver for a symmetric 3x3; returns eigenvalues ascending with
// matching eigenvectors as columns.
void eigen_symmetric3(const double a_in[3][3], double eigenvalues[3], double eigenvectors[3][3]) {
    double a[3][3];
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a[i][j] = a_in[i][j];

    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
        if (off < 1e-15) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(a[p][q]) < 1e-18) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    int order[3] = {0, 1, 2};
    std::sort(order, order + 3, [&](int x, int y) { return a[x][x] < a[y][y]; });
    for (int i = 0; i < 3; ++i) {
        eigenvalues[i] = a[order[i]][order[i]];
        for (int k = 0; k < 3; ++k) eigenvectors[k][i] = v[k][order[i]];
    }
}

} // namespace

RingProfile compute_ring(const std::vector<MatchedHit>& matches, const StereoRig& rig,
                         int ring_index, double axial_position_m, int angular_samples) {
    if (matches.size() < 3)
        raise(ErrorKind::DegenerateRing, "need at least 3 correspondences");

    std::vector<Point3> pts;
    pts.reserve(matches.size());
    for (const MatchedHit& m : matches) pts.push_back(triangulate(m.corr.left, m.corr.right, rig));

    Point3 mean{};
    for (const Point3& p : pts) mean = mean + p;
    mean = mean * (1.0 / pts.size());

    double cov[3][3] = {};
    for (const Point3& p : pts) {
        const Point3 d = p - mean;
        const double dv[3] = {d.x, d.y, d.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) cov[i][j] += dv[i] * dv[j];
    }
    double evals[3];
    double evecs[3][3];
    eigen_symmetric3(cov, evals, evecs);
    const Point3 normal{evecs[0][0], evecs[1][0], evecs[2][0]};
    Point3 e1{evecs[0][2], evecs[1][2], evecs[2][2]}; // largest-spread direction
    const Point3 e2 = cross(normal, e1);

    // Algebraic (Kasa) circle fit in the ring plane; exact for exact circle
    // points under any angular sampling.
    double suu = 0, suv = 0, svv = 0, suuu = 0, svvv = 0, suvv = 0, svuu = 0;
    std::vector<double> us(pts.size()), vs(pts.size());
    double umean = 0, vmean = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        us[i] = dot(pts[i] - mean, e1);
        vs[i] = dot(pts[i] - mean, e2);
        umean += us[i];
        vmean += vs[i];
    }
    umean /= pts.size();
    vmean /= pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double u = us[i] - umean, v = vs[i] - vmean;
        suu += u * u;
        suv += u * v;
        svv += v * v;
        suuu += u * u * u;
        svvv += v * v * v;
        suvv += u * v * v;
        svuu += v * u * u;
    }
    const double det = suu * svv - suv * suv;
    const double scale = std::max(suu, svv);
    if (!(det > 1e-9 * scale * scale) || scale <= 0.0)
        raise(ErrorKind::DegenerateRing, "points are collinear");
    const double rhs_u = 0.5 * (suuu + suvv);
    const double rhs_v = 0.5 * (svvv + svuu);
    const double uc = (rhs_u * svv - rhs_v * suv) / det;
    const double vc = (rhs_v * suu - rhs_u * suv) / det;
    const Point3 axis_point = mean + e1 * (uc + umean) + e2 * (vc + vmean);

    RingProfile ring;
    ring.ring_index = ring_index;
    ring.axial_position_m = axial_position_m;
    ring.angular_samples = angular_samples;
    ring.points.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        RingPoint pt;
        pt.angle = matches[i].angle;
        pt.p = pts[i];
        pt.radius_mm = norm(pts[i] - axis_point) * 1000.0;
        pt.flags = matches[i].flags;
        ring.points.push_back(pt);
    }
    return ring;
}

void colorize_ring(RingProfile& ring, const RgbImage& rgb, const CameraModel& rgb_cam) {
    for (RingPoint& pt : ring.points) {
        PixelPoint px;
        try {
            px = project_point(pt.p, rgb_cam);
        } catch (const Error&) {
            pt.flags |= kFlagColorOutOfFrame;
            continue;
        }
        if (px.x < 0 || px.y < 0 || px.x > rgb.width - 1 || px.y > rgb.height - 1) {
            pt.flags |= kFlagColorOutOfFrame;
            continue;
        }
        double c[3];
        sample_bilinear_rgb(rgb, px.x, px.y, c);
        pt.color = {static_cast<std::uint8_t>(std::clamp(std::lround(c[0]), 0L, 255L)),
                    static_cast<std::uint8_t>(std::clamp(std::lround(c[1]), 0L, 255L)),
                    static_cast<std::uint8_t>(std::clamp(std::lround(c[2]), 0L, 255L))};
    }
}

AffineProjection AffineProjection::from_model(const CameraModel& cam, double depth) {
    const CameraIntrinsics& k = cam.intrinsics;
    const double z = depth + cam.pose.t.z;
    if (!(z > 0.0)) raise(ErrorKind::BehindCamera, "reference depth behind the camera");
    AffineProjection a;
    a.sx = k.fx / z;
    a.sy = k.fy / z;
    a.cx = k.cx + k.fx * cam.pose.t.x / z;
    a.cy = k.cy + k.fy * cam.pose.t.y / z;
    return a;
}

TiltEstimate estimate_tilt(PixelPoint pixel_a, double depth_a, PixelPoint pixel_b, double depth_b,
                           const StereoRig& rig, double min_separation_px) {
    const double dx_px = pixel_a.x - pixel_b.x;
    const double dy_px = pixel_a.y - pixel_b.y;
    if (std::max(std::abs(dx_px), std::abs(dy_px)) < min_separation_px)
        raise(ErrorKind::DegenerateBaseline, "features too close for tilt estimation");

    const Point3 pa = back_project(pixel_a, depth_a, rig.left.intrinsics);
    const Point3 pb = back_project(pixel_b, depth_b, rig.left.intrinsics);
    TiltEstimate tilt;
    tilt.depth_a = depth_a;
    tilt.depth_b = depth_b;
    if (std::abs(dx_px) >= std::abs(dy_px))
        tilt.yaw = std::atan((pa.z - pb.z) / (pa.x - pb.x));
    else
        tilt.pitch = std::atan((pa.z - pb.z) / (pa.y - pb.y));
    return tilt;
}

} // namespace pipescan
