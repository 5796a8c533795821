#include "pipescan/throughput.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pipescan {

double reference_fps(int points_per_frame) {
    switch (points_per_frame) {
        case 1000: return 60.0;
        case 3000: return 30.0;
        case 6000: return 10.0;
        default: return 0.0;
    }
}

std::vector<ThroughputReport> measure_throughput(const std::vector<FramePair>& frames,
                                                 const StereoRig& rig, const ProcessParams& base,
                                                 const std::vector<int>& ray_settings,
                                                 int min_frames) {
    if (frames.empty()) raise(ErrorKind::InvalidArgument, "no frames to measure");
    std::vector<ThroughputReport> reports;
    CameraModel no_rgb; // colorization is not part of the measured path

    for (const int rays : ray_settings) {
        ProcessParams params = base;
        params.n_rays = rays;
        const FrameProcessor proc(rig, no_rgb, params);

        // Warmup, untimed.
        for (int w = 0; w < 3; ++w) {
            const FramePair& f = frames[w % frames.size()];
            (void)proc.process(f.left, f.right, nullptr, 0, 0.0);
        }

        const int n = std::max(min_frames, static_cast<int>(frames.size()));
        ThroughputReport report;
        report.points_per_frame = rays;
        report.frames = n;
        std::vector<double> latencies;
        latencies.reserve(n);
        const auto t_start = std::chrono::steady_clock::now();
        for (int i = 0; i < n; ++i) {
            const FramePair& f = frames[i % frames.size()];
            const auto t0 = std::chrono::steady_clock::now();
            const FrameResult r = proc.process(f.left, f.right, nullptr, i, 0.0);
            latencies.push_back(
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count());
            if (r.ok) {
                report.ms_undistort += r.timings.undistort_ms;
                report.ms_mask += r.timings.mask_ms;
                report.ms_hough += r.timings.hough_ms;
                report.ms_rays += r.timings.rays_ms;
                report.ms_match += r.timings.match_ms;
                report.ms_ring += r.timings.ring_ms;
            }
        }
        const double total_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        report.fps = n / total_s;
        for (const double l : latencies) report.ms_total += l;
        report.ms_total /= n;
        report.ms_undistort /= n;
        report.ms_mask /= n;
        report.ms_hough /= n;
        report.ms_rays /= n;
        report.ms_match /= n;
        report.ms_ring /= n;

        // Stability over 10-frame blocks.
        const int block = std::max(1, n / 10);
        std::vector<double> block_means;
        for (int b = 0; b + block <= n; b += block) {
            double sum = 0.0;
            for (int i = b; i < b + block; ++i) sum += latencies[i];
            block_means.push_back(sum / block);
        }
        if (block_means.size() > 1) {
            double mean = 0.0;
            for (const double m : block_means) mean += m;
            mean /= block_means.size();
            double var = 0.0;
            for (const double m : block_means) var += (m - mean) * (m - mean);
            var /= block_means.size();
            report.latency_cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
        }
        reports.push_back(report);
    }
    return reports;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        raise(ErrorKind::InvalidArgument, "linear fit needs >= 2 paired samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    LinearFit fit;
    if (std::abs(denom) < 1e-12) return fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0;
    const double mean_y = sy / n;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double pred = fit.slope * x[i] + fit.intercept;
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

void write_throughput_csv(const std::vector<ThroughputReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::IoFailure, "cannot write " + path);
    out << "points_per_frame,fps,frames,ms_total,ms_undistort,ms_mask,ms_hough,ms_rays,ms_match,"
           "ms_ring,latency_cv,reference_fps\n";
    out << std::setprecision(6) << std::fixed;
    for (const ThroughputReport& r : reports)
        out << r.points_per_frame << ',' << r.fps << ',' << r.frames << ',' << r.ms_total << ','
            << r.ms_undistort << ',' << r.ms_mask << ',' << r.ms_hough << ',' << r.ms_rays << ','
            << r.ms_match << ',' << r.ms_ring << ',' << r.latency_cv << ','
            << reference_fps(r.points_per_frame) << '\n';
    if (!out) raise(ErrorKind::IoFailure, "write failed for " + path);
}

std::string format_throughput_table(const std::vector<ThroughputReport>& reports) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << std::setw(10) << "points" << std::setw(12) << "fps" << std::setw(12) << "ms/frame"
        << std::setw(10) << "mask" << std::setw(10) << "hough" << std::setw(10) << "rays"
        << std::setw(10) << "match" << std::setw(10) << "ring" << std::setw(14) << "reference_fps"
        << "\n";
    for (const ThroughputReport& r : reports) {
        out << std::setw(10) << r.points_per_frame << std::setw(12) << r.fps << std::setw(12)
            << r.ms_total << std::setw(10) << r.ms_mask << std::setw(10) << r.ms_hough
            << std::setw(10) << r.ms_rays << std::setw(10) << r.ms_match << std::setw(10)
            << r.ms_ring;
        const double ref = reference_fps(r.points_per_frame);
        if (ref > 0.0)
            out << std::setw(14) << ref;
        else
            out << std::setw(14) << "-";
        out << "\n";
    }
    return out.str();
}

} // namespace pipescan
