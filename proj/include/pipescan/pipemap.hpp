#pragma once

#include <array>
#include <limits>
#include <vector>

#include "pipescan/odometry.hpp"
#include "pipescan/pipeline.hpp"
#include "pipescan/scene.hpp"

// Odometry-fused pipe map, defect heat maps, accuracy reports and meshing.

namespace pipescan {

struct DefectRegion {
    double axial_min = 0.0, axial_max = 0.0;   // m
    double angle_min = 0.0, angle_max = 0.0;   // rad
    double peak_deviation_mm = 0.0;            // signed, at the region peak
    int sign = 0;                              // +1 hole/outward, -1 protrusion/inward
    int point_count = 0;
};

struct PipeMap {
    std::vector<RingProfile> rings; // world frame, axial positions strictly increasing
    double nominal_diameter_m = 0.0;
    std::vector<DefectRegion> defect_regions;
    int rejected_rings = 0;
    double slip_tolerance_m = 0.0007; // ~2 ticks of the default wheel

    // Binds the nominal diameter and fills deviation_mm on every point.
    void bind_nominal(double diameter_m);
};

// Translates the ring from the camera frame into the world frame by the
// odometry displacement and appends it. Small regressions (wheel slip within
// the tolerance) are clamped forward; larger ones reject the ring, count it,
// and throw NonMonotoneOdometry.
void accumulate_ring(PipeMap& map, RingProfile ring, double displacement_m);

struct HeatMapStyle {
    std::array<double, 4> thresholds_mm{1.0, 3.0, 6.0, 10.0};
    std::array<Rgb, 4> shades{Rgb{150, 60, 50}, Rgb{190, 45, 35}, Rgb{225, 25, 18}, Rgb{255, 0, 0}};

    int bucket_of(double deviation_mm) const;            // 0 = base color
    Rgb color_for(double deviation_mm, Rgb base) const;
};

struct DefectParams {
    double threshold_mm = 2.0; // detection threshold on |deviation|
    int smooth_angles = 5;     // boxcar window across angular samples
    int smooth_rings = 3;      // boxcar window across rings
    int min_points = 15;       // reject smaller regions as noise
};

struct HeatMapResult {
    std::vector<std::vector<Rgb>> ring_colors; // aligned with map.rings[i].points
    std::vector<DefectRegion> regions;
};

// Colors every point by its |deviation| bucket and recomputes defect regions
// by flood-growing contiguous above-threshold cells of the (ring, angle)
// grid on a lightly smoothed deviation field. Updates map.defect_regions.
HeatMapResult compute_heatmap(PipeMap& map, const HeatMapStyle& style,
                              const DefectParams& params = {});

struct RmseReport {
    std::vector<double> per_ring_mm;
    std::vector<double> axial_m;
    std::vector<int> counts;
    double global_mm = 0.0; // mean of the per-ring values
};

// Radial RMSE against the nominal radius, per ring and global. Points inside
// detected defect regions are excluded when exclude_defect_regions is set
// (defects are quantified separately against their own ground truth).
RmseReport compute_rmse(const PipeMap& map, double nominal_diameter_m,
                        bool exclude_defect_regions = true);

// Radial RMSE against per-ring ground-truth radius fields (angle-interpolated);
// truth must be aligned with map.rings.
RmseReport compute_rmse_vs_truth(const PipeMap& map,
                                 const std::vector<std::vector<RingSample>>& truth);

struct TriangleMesh {
    std::vector<Point3> vertices;
    std::vector<Rgb> colors;
    std::vector<std::array<int, 3>> faces;
};

enum class MeshColor { none, rgb, heatmap };

// Quad strip between consecutive rings, split into triangles; quads touching
// a gap are omitted (holes, never degenerate triangles). Throws
// AngularMismatch when consecutive rings were sampled differently.
TriangleMesh build_mesh(const PipeMap& map, MeshColor color_mode,
                        const HeatMapStyle* style = nullptr);

} // namespace pipescan
