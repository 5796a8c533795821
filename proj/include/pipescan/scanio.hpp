#pragma once

#include <string>
#include <vector>

#include "pipescan/keyvalue.hpp"
#include "pipescan/pipemap.hpp"
#include "pipescan/scene.hpp"

// File formats: scene and rig descriptions (key-value text), the scan
// manifest (CSV), ground-truth ring CSVs, ring profile CSVs and report CSVs.
// Key names are documented in the README.

namespace pipescan {

struct SceneConfig {
    PipeSpec pipe;
    double scan_start = 0.05;
    double scan_end = 0.85;
    int scan_frames = 100;
    double wobble_x_amp = 0.0; // sinusoidal lateral wobble along the scan (m)
    double wobble_y_amp = 0.0;
    double wobble_cycles = 1.0;
    double pitch = 0.0;
    double yaw = 0.0;
    WheelSpec wheel;
    NoiseParams noise;
    int truth_samples = 4096;
    std::vector<IrMarker> markers;

    std::vector<ScanPose> trajectory() const;
};

SceneConfig load_scene(const std::string& path);
SceneConfig parse_scene(const KeyValueFile& kv);

struct RigConfig {
    StereoRig rig;   // identity poses; posed per frame by the simulator
    CameraModel rgb; // pose holds the left-IR -> RGB transform (translation mount)
    LaserPlane laser;
};

RigConfig load_rig(const std::string& path);
RigConfig parse_rig(const KeyValueFile& kv);

struct ScanFrameEntry {
    int index = 0;
    std::string left, right, rgb, truth; // paths relative to the scan directory
    long long ticks = 0;
    ScanPose pose; // ground-truth pose, for validation work
};

struct ScanManifest {
    std::string dir;
    std::vector<ScanFrameEntry> frames;
};

void write_manifest(const ScanManifest& manifest, const std::string& path);
ScanManifest read_manifest(const std::string& path);

void write_truth_csv(const std::vector<RingSample>& samples, const std::string& path);
std::vector<RingSample> read_truth_csv(const std::string& path);

// ring_index, axial_position_m, angle_rad, x_m, y_m, z_m, radius_mm,
// deviation_mm, r, g, b, flags
void write_rings_csv(const std::vector<RingProfile>& rings, const std::string& path);
std::vector<RingProfile> read_rings_csv(const std::string& path);

void write_rmse_csv(const RmseReport& report, const std::string& path);
void write_defects_csv(const std::vector<DefectRegion>& regions, const std::string& path);

} // namespace pipescan
