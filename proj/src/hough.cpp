#include "pipescan/hough.hpp"

#include <algorithm>
#include <cmath>

#include "pipescan/errors.hpp"
#include "pipescan/parallel.hpp"

namespace pipescan {

namespace {

inline void vote_center_row(const std::vector<MaskPoint>& pts, const HoughGrid& g, int icy,
                            std::vector<int>& acc) {
    const double cy = g.cy0 + icy * g.center_step;
    const double inv_rstep = 1.0 / g.r_step;
    int* row = acc.data() + static_cast<std::size_t>(icy) * g.ncx * g.nr;
    for (int icx = 0; icx < g.ncx; ++icx) {
        const double cx = g.cx0 + icx * g.center_step;
        int* cell = row + static_cast<std::size_t>(icx) * g.nr;
        for (const MaskPoint& p : pts) {
            const double dx = p.x - cx;
            const double dy = p.y - cy;
            const double d = std::sqrt(dx * dx + dy * dy);
            const int bin = static_cast<int>(std::lround((d - g.r0) * inv_rstep));
            if (bin >= 0 && bin < g.nr) ++cell[bin];
        }
    }
}

} // namespace

void hough_vote_serial(const std::vector<MaskPoint>& pts, const HoughGrid& g,
                       std::vector<int>& acc) {
    acc.assign(g.size(), 0);
    for (int icy = 0; icy < g.ncy; ++icy) vote_center_row(pts, g, icy, acc);
}

void hough_vote_omp(const std::vector<MaskPoint>& pts, const HoughGrid& g, std::vector<int>& acc) {
    acc.assign(g.size(), 0);
#pragma omp parallel for schedule(static)
    for (int icy = 0; icy < g.ncy; ++icy) vote_center_row(pts, g, icy, acc);
}

namespace {

void run_votes(const std::vector<MaskPoint>& pts, const HoughGrid& g, std::vector<int>& acc) {
    if (parallel_enabled())
        hough_vote_omp(pts, g, acc);
    else
        hough_vote_serial(pts, g, acc);
}

struct PeakIndex {
    int icx = 0, icy = 0, ir = 0;
    int votes = 0;
};

PeakIndex arg_max(const std::vector<int>& acc, const HoughGrid& g) {
    PeakIndex best;
    std::size_t i = 0;
    for (int icy = 0; icy < g.ncy; ++icy)
        for (int icx = 0; icx < g.ncx; ++icx)
            for (int ir = 0; ir < g.nr; ++ir, ++i)
                if (acc[i] > best.votes) best = {icx, icy, ir, acc[i]};
    return best;
}

inline int acc_at(const std::vector<int>& acc, const HoughGrid& g, int icx, int icy, int ir) {
    return acc[(static_cast<std::size_t>(icy) * g.ncx + icx) * g.nr + ir];
}

// 3-point quadratic offset of a sampled peak, in bin units, clamped to the
// half-bin the peak can actually move.
double quad_offset(double m1, double p0, double p1) {
    const double denom = m1 - 2.0 * p0 + p1;
    if (std::abs(denom) < 1e-12) return 0.0;
    return std::clamp(0.5 * (m1 - p1) / denom, -0.5, 0.5);
}

std::vector<MaskPoint> mask_points(const BinaryMask& mask, int stride_target) {
    std::vector<MaskPoint> pts;
    pts.reserve(4096);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) pts.push_back({static_cast<float>(x), static_cast<float>(y)});
    if (stride_target > 0 && static_cast<int>(pts.size()) > stride_target) {
        const std::size_t stride = pts.size() / static_cast<std::size_t>(stride_target);
        std::vector<MaskPoint> dec;
        dec.reserve(static_cast<std::size_t>(stride_target) + 1);
        for (std::size_t i = 0; i < pts.size(); i += stride) dec.push_back(pts[i]);
        return dec;
    }
    return pts;
}

} // namespace

RingCenter detect_center(const BinaryMask& mask, double r_min, double r_max) {
    HoughParams p;
    p.r_min = r_min;
    p.r_max = r_max;
    return detect_center(mask, p);
}

RingCenter detect_center(const BinaryMask& mask, const HoughParams& params) {
    if (!(params.r_min > 0.0) || !(params.r_max > params.r_min))
        raise(ErrorKind::InvalidArgument, "need 0 < r_min < r_max");

    const std::vector<MaskPoint> all_pts = mask_points(mask, 0);
    if (all_pts.empty()) raise(ErrorKind::NoCircle, "mask is empty");

    double sx = 0.0, sy = 0.0;
    for (const MaskPoint& p : all_pts) {
        sx += p.x;
        sy += p.y;
    }
    const double seed_x = std::round(sx / all_pts.size());
    const double seed_y = std::round(sy / all_pts.size());

    // Coarse stage: decimated points, 4 px cells over a span wide enough to
    // absorb the centroid bias of a partly occluded ring.
    const std::vector<MaskPoint> coarse_pts = mask_points(mask, params.coarse_points);
    HoughGrid coarse;
    coarse.center_step = params.coarse_step;
    coarse.ncx = coarse.ncy = 2 * params.coarse_halfspan / params.coarse_step + 1;
    coarse.cx0 = seed_x - params.coarse_halfspan;
    coarse.cy0 = seed_y - params.coarse_halfspan;
    coarse.r0 = params.r_min;
    coarse.r_step = params.coarse_step;
    coarse.nr = static_cast<int>(std::ceil((params.r_max - params.r_min) / coarse.r_step)) + 1;

    std::vector<int> acc;
    run_votes(coarse_pts, coarse, acc);
    const PeakIndex cpeak = arg_max(acc, coarse);

    double center_x = coarse.cx0 + cpeak.icx * coarse.center_step;
    double center_y = coarse.cy0 + cpeak.icy * coarse.center_step;
    double radius = coarse.r0 + cpeak.ir * coarse.r_step;

    // Fine stage: all points, 1 px centers, 2 px radius bins. Re-centered if
    // the peak lands on the window edge.
    HoughGrid fine;
    PeakIndex fpeak;
    for (int attempt = 0; attempt < 3; ++attempt) {
        fine.center_step = 1.0;
        fine.ncx = fine.ncy = 2 * params.fine_halfspan + 1;
        fine.cx0 = std::round(center_x) - params.fine_halfspan;
        fine.cy0 = std::round(center_y) - params.fine_halfspan;
        fine.r_step = 2.0;
        fine.nr = params.fine_r_halfspan + 1; // +-fine_r_halfspan at 2 px bins
        fine.r0 = std::max(params.r_min, radius - params.fine_r_halfspan);

        run_votes(all_pts, fine, acc);
        fpeak = arg_max(acc, fine);
        center_x = fine.cx0 + fpeak.icx * fine.center_step;
        center_y = fine.cy0 + fpeak.icy * fine.center_step;
        radius = fine.r0 + fpeak.ir * fine.r_step;
        const bool on_edge = fpeak.icx == 0 || fpeak.icx == fine.ncx - 1 || fpeak.icy == 0 ||
                             fpeak.icy == fine.ncy - 1;
        if (!on_edge) break;
    }

    if (fpeak.votes < params.min_votes)
        raise(ErrorKind::NoCircle, "peak votes below minimum");

    // Sub-pixel interpolation along each axis of the fine accumulator.
    RingCenter result;
    result.cx = center_x;
    result.cy = center_y;
    result.r_est = radius;
    if (fpeak.icx > 0 && fpeak.icx < fine.ncx - 1)
        result.cx += quad_offset(acc_at(acc, fine, fpeak.icx - 1, fpeak.icy, fpeak.ir), fpeak.votes,
                                 acc_at(acc, fine, fpeak.icx + 1, fpeak.icy, fpeak.ir));
    if (fpeak.icy > 0 && fpeak.icy < fine.ncy - 1)
        result.cy += quad_offset(acc_at(acc, fine, fpeak.icx, fpeak.icy - 1, fpeak.ir), fpeak.votes,
                                 acc_at(acc, fine, fpeak.icx, fpeak.icy + 1, fpeak.ir));
    if (fpeak.ir > 0 && fpeak.ir < fine.nr - 1)
        result.r_est += fine.r_step * quad_offset(acc_at(acc, fine, fpeak.icx, fpeak.icy, fpeak.ir - 1),
                                                  fpeak.votes,
                                                  acc_at(acc, fine, fpeak.icx, fpeak.icy, fpeak.ir + 1));

    // Peak ratio: votes near the peak radius against all votes cast by the
    // 3x3 center neighborhood. A clean single ring concentrates essentially
    // all its votes there; debris and spurious arcs dilute it.
    long long peak_votes = 0, neighborhood_votes = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            const int icx = fpeak.icx + dx, icy = fpeak.icy + dy;
            if (icx < 0 || icx >= fine.ncx || icy < 0 || icy >= fine.ncy) continue;
            for (int ir = 0; ir < fine.nr; ++ir) {
                const int v = acc_at(acc, fine, icx, icy, ir);
                neighborhood_votes += v;
                if (std::abs(ir - fpeak.ir) <= 1) peak_votes += v;
            }
        }
    result.confidence =
        neighborhood_votes > 0 ? static_cast<double>(peak_votes) / neighborhood_votes : 0.0;

    if (result.confidence < params.confidence_floor)
        raise(ErrorKind::NoCircle, "peak confidence " + std::to_string(result.confidence) +
                                       " below floor");

    result.cx = std::clamp(result.cx, 0.0, static_cast<double>(mask.width - 1));
    result.cy = std::clamp(result.cy, 0.0, static_cast<double>(mask.height - 1));
    result.r_est = std::clamp(result.r_est, params.r_min, params.r_max);
    return result;
}

} // namespace pipescan
