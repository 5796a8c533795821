#include "pipescan/pipemap.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace pipescan {

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

void PipeMap::bind_nominal(double diameter_m) {
    if (!(diameter_m > 0.0)) raise(ErrorKind::InvalidArgument, "nominal diameter must be positive");
    nominal_diameter_m = diameter_m;
    const double nominal_radius_mm = diameter_m * 500.0;
    for (RingProfile& ring : rings)
        for (RingPoint& pt : ring.points) pt.deviation_mm = pt.radius_mm - nominal_radius_mm;
}

void accumulate_ring(PipeMap& map, RingProfile ring, double displacement_m) {
    double previous = -std::numeric_limits<double>::infinity();
    if (!map.rings.empty()) previous = map.rings.back().axial_position_m;

    if (displacement_m < previous - map.slip_tolerance_m) {
        ++map.rejected_rings;
        raise(ErrorKind::NonMonotoneOdometry,
              "displacement regressed by " + std::to_string(previous - displacement_m) + " m");
    }
    // Slip within tolerance: clamp forward so ring ordering stays strict.
    double position = displacement_m;
    if (position <= previous) position = previous + 1e-9;

    // World transform is a pure axial translation of the camera-frame points.
    for (RingPoint& pt : ring.points) pt.p.z += position;
    ring.axial_position_m = position;
    if (map.nominal_diameter_m > 0.0) {
        const double nominal_radius_mm = map.nominal_diameter_m * 500.0;
        for (RingPoint& pt : ring.points) pt.deviation_mm = pt.radius_mm - nominal_radius_mm;
    }
    map.rings.push_back(std::move(ring));
}

int HeatMapStyle::bucket_of(double deviation_mm) const {
    const double mag = std::abs(deviation_mm);
    int bucket = 0;
    for (const double t : thresholds_mm)
        if (mag >= t) ++bucket;
    return bucket;
}

Rgb HeatMapStyle::color_for(double deviation_mm, Rgb base) const {
    const int bucket = bucket_of(deviation_mm);
    if (bucket == 0) return base;
    return shades[static_cast<std::size_t>(bucket - 1)];
}

namespace {

// Deviation grid over (ring, angular index); NaN marks gaps.
struct DeviationGrid {
    int n_rings = 0;
    int n_angles = 0;
    std::vector<double> dev;

    double& at(int i, int k) { return dev[static_cast<std::size_t>(i) * n_angles + k]; }
    double at(int i, int k) const { return dev[static_cast<std::size_t>(i) * n_angles + k]; }
};

int angle_index(double angle, int n_angles) {
    const int k = static_cast<int>(std::lround(angle / (kTwoPi / n_angles)));
    return ((k % n_angles) + n_angles) % n_angles;
}

bool uniform_sampling(const PipeMap& map, int& n_angles) {
    if (map.rings.empty()) return false;
    n_angles = map.rings.front().angular_samples;
    for (const RingProfile& r : map.rings)
        if (r.angular_samples != n_angles) return false;
    return n_angles > 0;
}

DeviationGrid build_grid(const PipeMap& map, int n_angles) {
    DeviationGrid g;
    g.n_rings = static_cast<int>(map.rings.size());
    g.n_angles = n_angles;
    g.dev.assign(static_cast<std::size_t>(g.n_rings) * n_angles, kNaN);
    for (int i = 0; i < g.n_rings; ++i)
        for (const RingPoint& pt : map.rings[i].points)
            g.at(i, angle_index(pt.angle, n_angles)) = pt.deviation_mm;
    return g;
}

DeviationGrid smooth_grid(const DeviationGrid& g, int window_angles, int window_rings) {
    DeviationGrid tmp = g;
    const int ha = window_angles / 2;
    // Angular boxcar with wraparound.
    for (int i = 0; i < g.n_rings; ++i)
        for (int k = 0; k < g.n_angles; ++k) {
            double sum = 0.0;
            int n = 0;
            for (int d = -ha; d <= ha; ++d) {
                const double v = g.at(i, ((k + d) % g.n_angles + g.n_angles) % g.n_angles);
                if (!std::isnan(v)) {
                    sum += v;
                    ++n;
                }
            }
            tmp.at(i, k) = n > 0 ? sum / n : kNaN;
        }
    DeviationGrid out = tmp;
    const int hr = window_rings / 2;
    for (int i = 0; i < g.n_rings; ++i)
        for (int k = 0; k < g.n_angles; ++k) {
            double sum = 0.0;
            int n = 0;
            for (int d = -hr; d <= hr; ++d) {
                const int r = i + d;
                if (r < 0 || r >= g.n_rings) continue;
                const double v = tmp.at(r, k);
                if (!std::isnan(v)) {
                    sum += v;
                    ++n;
                }
            }
            out.at(i, k) = n > 0 ? sum / n : kNaN;
        }
    return out;
}

std::vector<DefectRegion> grow_regions(const PipeMap& map, const DeviationGrid& sm,
                                       const DefectParams& params) {
    std::vector<DefectRegion> regions;
    std::vector<std::uint8_t> visited(sm.dev.size(), 0);
    const auto idx = [&](int i, int k) { return static_cast<std::size_t>(i) * sm.n_angles + k; };

    for (int i0 = 0; i0 < sm.n_rings; ++i0)
        for (int k0 = 0; k0 < sm.n_angles; ++k0) {
            if (visited[idx(i0, k0)]) continue;
            const double seed = sm.at(i0, k0);
            if (std::isnan(seed) || std::abs(seed) < params.threshold_mm) continue;
            const int sign = seed > 0 ? 1 : -1;

            DefectRegion region;
            region.sign = sign;
            region.axial_min = region.axial_max = map.rings[i0].axial_position_m;
            region.angle_min = region.angle_max = k0 * kTwoPi / sm.n_angles;
            region.peak_deviation_mm = seed;

            std::deque<std::pair<int, int>> queue{{i0, k0}};
            visited[idx(i0, k0)] = 1;
            while (!queue.empty()) {
                const auto [i, k] = queue.front();
                queue.pop_front();
                ++region.point_count;
                const double v = sm.at(i, k);
                const double axial = map.rings[i].axial_position_m;
                const double angle = k * kTwoPi / sm.n_angles;
                region.axial_min = std::min(region.axial_min, axial);
                region.axial_max = std::max(region.axial_max, axial);
                region.angle_min = std::min(region.angle_min, angle);
                region.angle_max = std::max(region.angle_max, angle);
                if (std::abs(v) > std::abs(region.peak_deviation_mm)) region.peak_deviation_mm = v;

                const int neighbors[4][2] = {{i - 1, k}, {i + 1, k},
                                             {i, (k + 1) % sm.n_angles},
                                             {i, (k - 1 + sm.n_angles) % sm.n_angles}};
                for (const auto& nb : neighbors) {
                    const int ni = nb[0], nk = nb[1];
                    if (ni < 0 || ni >= sm.n_rings || visited[idx(ni, nk)]) continue;
                    const double nv = sm.at(ni, nk);
                    if (std::isnan(nv) || std::abs(nv) < params.threshold_mm) continue;
                    if ((nv > 0 ? 1 : -1) != sign) continue;
                    visited[idx(ni, nk)] = 1;
                    queue.push_back({ni, nk});
                }
            }
            if (region.point_count >= params.min_points) regions.push_back(region);
        }
    std::sort(regions.begin(), regions.end(), [](const DefectRegion& a, const DefectRegion& b) {
        return std::abs(a.peak_deviation_mm) > std::abs(b.peak_deviation_mm);
    });
    return regions;
}

} // namespace

HeatMapResult compute_heatmap(PipeMap& map, const HeatMapStyle& style, const DefectParams& params) {
    if (!(map.nominal_diameter_m > 0.0))
        raise(ErrorKind::InvalidArgument, "nominal diameter not bound");

    HeatMapResult result;
    result.ring_colors.reserve(map.rings.size());
    for (const RingProfile& ring : map.rings) {
        std::vector<Rgb> colors;
        colors.reserve(ring.points.size());
        for (const RingPoint& pt : ring.points)
            colors.push_back(style.color_for(pt.deviation_mm, pt.color));
        result.ring_colors.push_back(std::move(colors));
    }

    int n_angles = 0;
    if (uniform_sampling(map, n_angles)) {
        const DeviationGrid grid = build_grid(map, n_angles);
        const DeviationGrid smoothed = smooth_grid(grid, params.smooth_angles, params.smooth_rings);
        result.regions = grow_regions(map, smoothed, params);
    }
    map.defect_regions = result.regions;
    return result;
}

namespace {

bool in_region(const DefectRegion& r, double axial, double angle) {
    return axial >= r.axial_min && axial <= r.axial_max && angle >= r.angle_min &&
           angle <= r.angle_max;
}

RmseReport finish_report(RmseReport report) {
    double sum = 0.0;
    int n = 0;
    for (const double v : report.per_ring_mm)
        if (!std::isnan(v)) {
            sum += v;
            ++n;
        }
    report.global_mm = n > 0 ? sum / n : kNaN;
    return report;
}

} // namespace

RmseReport compute_rmse(const PipeMap& map, double nominal_diameter_m,
                        bool exclude_defect_regions) {
    if (map.rings.empty()) raise(ErrorKind::InvalidArgument, "map is empty");
    const double ref_mm = nominal_diameter_m * 500.0;
    RmseReport report;
    for (const RingProfile& ring : map.rings) {
        double sq = 0.0;
        int n = 0;
        for (const RingPoint& pt : ring.points) {
            if (exclude_defect_regions) {
                bool excluded = false;
                for (const DefectRegion& r : map.defect_regions)
                    if (in_region(r, ring.axial_position_m, pt.angle)) {
                        excluded = true;
                        break;
                    }
                if (excluded) continue;
            }
            const double resid = pt.radius_mm - ref_mm;
            sq += resid * resid;
            ++n;
        }
        report.per_ring_mm.push_back(n > 0 ? std::sqrt(sq / n) : kNaN);
        report.axial_m.push_back(ring.axial_position_m);
        report.counts.push_back(n);
    }
    return finish_report(std::move(report));
}

RmseReport compute_rmse_vs_truth(const PipeMap& map,
                                 const std::vector<std::vector<RingSample>>& truth) {
    if (map.rings.size() != truth.size())
        raise(ErrorKind::InvalidArgument, "truth not aligned with map rings");
    RmseReport report;
    for (std::size_t i = 0; i < map.rings.size(); ++i) {
        const RingProfile& ring = map.rings[i];
        const std::vector<RingSample>& t = truth[i];
        double sq = 0.0;
        int n = 0;
        if (t.size() >= 2) {
            const double step = kTwoPi / t.size(); // truth is uniform in angle
            for (const RingPoint& pt : ring.points) {
                double a = std::fmod(pt.angle, kTwoPi);
                if (a < 0) a += kTwoPi;
                const double s = a / step;
                const std::size_t k0 = static_cast<std::size_t>(s) % t.size();
                const std::size_t k1 = (k0 + 1) % t.size();
                const double f = s - std::floor(s);
                const double truth_mm = (t[k0].radius * (1.0 - f) + t[k1].radius * f) * 1000.0;
                const double resid = pt.radius_mm - truth_mm;
                sq += resid * resid;
                ++n;
            }
        }
        report.per_ring_mm.push_back(n > 0 ? std::sqrt(sq / n) : kNaN);
        report.axial_m.push_back(ring.axial_position_m);
        report.counts.push_back(n);
    }
    return finish_report(std::move(report));
}

TriangleMesh build_mesh(const PipeMap& map, MeshColor color_mode, const HeatMapStyle* style) {
    if (map.rings.size() < 2) raise(ErrorKind::InvalidArgument, "need at least 2 rings");
    const HeatMapStyle default_style;
    if (color_mode == MeshColor::heatmap && !style) style = &default_style;

    TriangleMesh mesh;
    const int n_rings = static_cast<int>(map.rings.size());
    const int n_angles = map.rings.front().angular_samples;
    for (int i = 1; i < n_rings; ++i)
        if (map.rings[i].angular_samples != map.rings[i - 1].angular_samples)
            raise(ErrorKind::AngularMismatch,
                  "rings " + std::to_string(i - 1) + " and " + std::to_string(i) +
                      " have different angular sampling");

    // Vertex grid; -1 marks gaps.
    std::vector<int> grid(static_cast<std::size_t>(n_rings) * n_angles, -1);
    for (int i = 0; i < n_rings; ++i)
        for (const RingPoint& pt : map.rings[i].points) {
            const int k = angle_index(pt.angle, n_angles);
            grid[static_cast<std::size_t>(i) * n_angles + k] = static_cast<int>(mesh.vertices.size());
            mesh.vertices.push_back(pt.p);
            switch (color_mode) {
                case MeshColor::none: mesh.colors.push_back({200, 200, 200}); break;
                case MeshColor::rgb: mesh.colors.push_back(pt.color); break;
                case MeshColor::heatmap:
                    mesh.colors.push_back(style->color_for(pt.deviation_mm, pt.color));
                    break;
            }
        }

    const auto vertex = [&](int i, int k) { return grid[static_cast<std::size_t>(i) * n_angles + (k % n_angles)]; };
    for (int i = 0; i + 1 < n_rings; ++i)
        for (int k = 0; k < n_angles; ++k) {
            const int v00 = vertex(i, k);
            const int v01 = vertex(i, k + 1);
            const int v10 = vertex(i + 1, k);
            const int v11 = vertex(i + 1, k + 1);
            if (v00 < 0 || v01 < 0 || v10 < 0 || v11 < 0) continue; // gap -> hole
            mesh.faces.push_back({v00, v10, v01});
            mesh.faces.push_back({v10, v11, v01});
        }
    return mesh;
}

} // namespace pipescan
