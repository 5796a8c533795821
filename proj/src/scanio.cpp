#include "pipescan/scanio.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pipescan {

namespace {

Rgb parse_rgb(const std::string& text, const std::string& key) {
    std::istringstream ss(text);
    int r, g, b;
    if (!(ss >> r >> g >> b) || r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255)
        raise(ErrorKind::InvalidConfig, "key '" + key + "' needs 'r g b' in 0..255");
    return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b)};
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

} // namespace

std::vector<ScanPose> SceneConfig::trajectory() const {
    std::vector<ScanPose> poses;
    poses.reserve(scan_frames);
    for (int k = 0; k < scan_frames; ++k) {
        const double f = scan_frames > 1 ? static_cast<double>(k) / (scan_frames - 1) : 0.0;
        ScanPose pose;
        pose.axial = scan_start + (scan_end - scan_start) * f;
        const double phase = 6.283185307179586 * wobble_cycles * f;
        pose.lateral_x = wobble_x_amp * std::sin(phase);
        pose.lateral_y = wobble_y_amp * std::cos(phase);
        pose.pitch = pitch;
        pose.yaw = yaw;
        poses.push_back(pose);
    }
    return poses;
}

SceneConfig parse_scene(const KeyValueFile& kv) {
    SceneConfig scene;
    scene.pipe.nominal_diameter = kv.get_double("pipe.diameter");
    scene.pipe.length = kv.get_double("pipe.length");

    const std::string texture = kv.get_string("texture", "uniform");
    if (texture == "uniform")
        scene.pipe.texture.kind = WallTexture::Kind::uniform;
    else if (texture == "stripe")
        scene.pipe.texture.kind = WallTexture::Kind::stripe;
    else if (texture == "checker")
        scene.pipe.texture.kind = WallTexture::Kind::checker;
    else
        raise(ErrorKind::InvalidConfig, "unknown texture '" + texture + "'");
    if (kv.has("texture.base")) scene.pipe.texture.base = parse_rgb(kv.get_string("texture.base"), "texture.base");
    if (kv.has("texture.base_alt"))
        scene.pipe.texture.base_alt = parse_rgb(kv.get_string("texture.base_alt"), "texture.base_alt");
    if (kv.has("texture.accent"))
        scene.pipe.texture.accent = parse_rgb(kv.get_string("texture.accent"), "texture.accent");
    scene.pipe.texture.stripe_angle = kv.get_double("texture.stripe_angle", 0.0);
    scene.pipe.texture.stripe_halfwidth = kv.get_double("texture.stripe_halfwidth", 0.15);

    const int n_defects = static_cast<int>(kv.get_int("defect.count", 0));
    for (int i = 1; i <= n_defects; ++i) {
        const std::string p = "defect." + std::to_string(i) + ".";
        DefectSpec d;
        const std::string kind = kv.get_string(p + "kind");
        if (kind == "protrusion")
            d.kind = DefectKind::protrusion;
        else if (kind == "hole")
            d.kind = DefectKind::hole;
        else if (kind == "ovality")
            d.kind = DefectKind::ovality_patch;
        else
            raise(ErrorKind::InvalidConfig, "unknown defect kind '" + kind + "'");
        d.axial_center = kv.get_double(p + "axial");
        d.angular_center = kv.get_double(p + "angle");
        d.axial_extent = kv.get_double(p + "axial_extent");
        d.angular_extent = kv.get_double(p + "angular_extent");
        d.magnitude = kv.get_double(p + "magnitude");
        scene.pipe.defects.push_back(d);
    }

    scene.pipe.roughness_amplitude = kv.get_double("roughness.amplitude", 0.0);
    scene.pipe.roughness_seed = static_cast<std::uint32_t>(kv.get_int("roughness.seed", 0));

    scene.scan_start = kv.get_double("scan.start");
    scene.scan_end = kv.get_double("scan.end");
    scene.scan_frames = static_cast<int>(kv.get_int("scan.frames"));
    scene.wobble_x_amp = kv.get_double("scan.wobble_x", 0.0);
    scene.wobble_y_amp = kv.get_double("scan.wobble_y", 0.0);
    scene.wobble_cycles = kv.get_double("scan.wobble_cycles", 1.0);
    scene.pitch = kv.get_double("scan.pitch", 0.0);
    scene.yaw = kv.get_double("scan.yaw", 0.0);
    if (scene.scan_frames < 1) raise(ErrorKind::InvalidConfig, "scan.frames must be >= 1");

    scene.wheel.circumference = kv.get_double("wheel.circumference", 0.35);
    scene.wheel.pulses_per_rev = static_cast<int>(kv.get_int("wheel.ppr", 1000));
    scene.noise.pixel_sigma = kv.get_double("noise.pixel_sigma", 2.0);
    scene.noise.jitter_px = kv.get_double("noise.jitter_px", 0.3);
    scene.truth_samples = static_cast<int>(kv.get_int("truth.samples", 4096));

    const int n_markers = static_cast<int>(kv.get_int("marker.count", 0));
    for (int i = 1; i <= n_markers; ++i) {
        const std::string p = "marker." + std::to_string(i) + ".";
        IrMarker m;
        m.axial = kv.get_double(p + "axial");
        m.angle = kv.get_double(p + "angle");
        m.intensity = kv.get_double(p + "intensity", 200.0);
        m.sigma_px = kv.get_double(p + "sigma_px", 1.5);
        scene.markers.push_back(m);
    }

    scene.pipe.validate();
    scene.wheel.validate();
    return scene;
}

SceneConfig load_scene(const std::string& path) { return parse_scene(KeyValueFile::load(path)); }

namespace {

CameraModel parse_camera(const KeyValueFile& kv, const std::string& prefix) {
    CameraModel cam;
    cam.intrinsics.width = static_cast<int>(kv.get_int(prefix + "width"));
    cam.intrinsics.height = static_cast<int>(kv.get_int(prefix + "height"));
    cam.intrinsics.fx = kv.get_double(prefix + "fx");
    cam.intrinsics.fy = kv.get_double(prefix + "fy");
    cam.intrinsics.cx = kv.get_double(prefix + "cx");
    cam.intrinsics.cy = kv.get_double(prefix + "cy");
    cam.intrinsics.skew = kv.get_double(prefix + "skew", 0.0);
    cam.intrinsics.validate();
    cam.distortion = DistortionCoeffs::make(
        kv.get_double(prefix + "k1", 0.0), kv.get_double(prefix + "k2", 0.0),
        kv.get_double(prefix + "k3", 0.0), kv.get_double(prefix + "fov_radius", 2.6));
    return cam;
}

} // namespace

RigConfig parse_rig(const KeyValueFile& kv) {
    RigConfig rig;
    const CameraModel ir = parse_camera(kv, "ir.");
    rig.rig.left = ir;
    rig.rig.right = ir;
    rig.rig.baseline = kv.get_double("baseline");
    rig.rig.rectified = true;
    rig.rig.validate();

    rig.rgb = parse_camera(kv, "rgb.");
    const Point3 mount{kv.get_double("rgb.offset_x", 0.0), kv.get_double("rgb.offset_y", 0.0),
                       kv.get_double("rgb.offset_z", 0.0)};
    rig.rgb.pose.r = Mat3::identity();
    rig.rgb.pose.t = mount * -1.0; // p_rgb = p_left - mount

    rig.laser.offset = kv.get_double("laser.offset", 0.15);
    rig.laser.sigma_px = kv.get_double("laser.sigma_px", 1.2);
    rig.laser.power = kv.get_double("laser.power", 1.0);
    rig.laser.attenuation = kv.get_double("laser.attenuation", 0.3);
    rig.laser.validate();
    return rig;
}

RigConfig load_rig(const std::string& path) { return parse_rig(KeyValueFile::load(path)); }

void write_manifest(const ScanManifest& manifest, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::IoFailure, "cannot write " + path);
    out << "index,left,right,rgb,truth,ticks,axial,lateral_x,lateral_y,pitch,yaw\n";
    out << std::setprecision(17);
    for (const ScanFrameEntry& f : manifest.frames)
        out << f.index << ',' << f.left << ',' << f.right << ',' << f.rgb << ',' << f.truth << ','
            << f.ticks << ',' << f.pose.axial << ',' << f.pose.lateral_x << ',' << f.pose.lateral_y
            << ',' << f.pose.pitch << ',' << f.pose.yaw << '\n';
    if (!out) raise(ErrorKind::IoFailure, "write failed for " + path);
}

ScanManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::IoFailure, "cannot open " + path);
    ScanManifest manifest;
    const auto slash = path.find_last_of('/');
    manifest.dir = slash == std::string::npos ? "." : path.substr(0, slash);
    std::string line;
    if (!std::getline(in, line) || line.rfind("index,left,right", 0) != 0)
        raise(ErrorKind::InvalidConfig, path + ": not a scan manifest");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != 11) raise(ErrorKind::InvalidConfig, path + ": malformed row '" + line + "'");
        ScanFrameEntry f;
        try {
            f.index = std::stoi(cells[0]);
            f.left = cells[1];
            f.right = cells[2];
            f.rgb = cells[3];
            f.truth = cells[4];
            f.ticks = std::stoll(cells[5]);
            f.pose.axial = std::stod(cells[6]);
            f.pose.lateral_x = std::stod(cells[7]);
            f.pose.lateral_y = std::stod(cells[8]);
            f.pose.pitch = std::stod(cells[9]);
            f.pose.yaw = std::stod(cells[10]);
        } catch (const std::exception&) {
            raise(ErrorKind::InvalidConfig, path + ": malformed row '" + line + "'");
        }
        manifest.frames.push_back(f);
    }
    return manifest;
}

void write_truth_csv(const std::vector<RingSample>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::IoFailure, "cannot write " + path);
    out << "angle_rad,x_m,y_m,z_m,radius_m\n";
    out << std::setprecision(17);
    for (const RingSample& s : samples)
        out << s.angle << ',' << s.cam_point.x << ',' << s.cam_point.y << ',' << s.cam_point.z
            << ',' << s.radius << '\n';
    if (!out) raise(ErrorKind::IoFailure, "write failed for " + path);
}

std::vector<RingSample> read_truth_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::IoFailure, "cannot open " + path);
    std::vector<RingSample> samples;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != 5) raise(ErrorKind::IoFailure, path + ": malformed row");
        RingSample s;
        s.angle = std::stod(cells[0]);
        s.cam_point = {std::stod(cells[1]), std::stod(cells[2]), std::stod(cells[3])};
        s.radius = std::stod(cells[4]);
        samples.push_back(s);
    }
    return samples;
}

void write_rings_csv(const std::vector<RingProfile>& rings, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::IoFailure, "cannot write " + path);
    out << "ring_index,axial_position_m,angle_rad,x_m,y_m,z_m,radius_mm,deviation_mm,r,g,b,flags\n";
    out << std::setprecision(12);
    for (const RingProfile& ring : rings)
        for (const RingPoint& pt : ring.points)
            out << ring.ring_index << ',' << ring.axial_position_m << ',' << pt.angle << ','
                << pt.p.x << ',' << pt.p.y << ',' << pt.p.z << ',' << pt.radius_mm << ','
                << pt.deviation_mm << ',' << int(pt.color.r) << ',' << int(pt.color.g) << ','
                << int(pt.color.b) << ',' << pt.flags << '\n';
    if (!out) raise(ErrorKind::IoFailure, "write failed for " + path);
}

std::vector<RingProfile> read_rings_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::IoFailure, "cannot open " + path);
    std::vector<RingProfile> rings;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != 12) raise(ErrorKind::IoFailure, path + ": malformed row");
        const int index = std::stoi(cells[0]);
        if (rings.empty() || rings.back().ring_index != index) {
            RingProfile ring;
            ring.ring_index = index;
            ring.axial_position_m = std::stod(cells[1]);
            rings.push_back(ring);
        }
        RingPoint pt;
        pt.angle = std::stod(cells[2]);
        pt.p = {std::stod(cells[3]), std::stod(cells[4]), std::stod(cells[5])};
        pt.radius_mm = std::stod(cells[6]);
        pt.deviation_mm = std::stod(cells[7]);
        pt.color = {static_cast<std::uint8_t>(std::stoi(cells[8])),
                    static_cast<std::uint8_t>(std::stoi(cells[9])),
                    static_cast<std::uint8_t>(std::stoi(cells[10]))};
        pt.flags = static_cast<unsigned>(std::stoul(cells[11]));
        rings.back().points.push_back(pt);
    }
    return rings;
}

void write_rmse_csv(const RmseReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::IoFailure, "cannot write " + path);
    out << "ring_index,axial_m,rmse_mm,points\n";
    out << std::setprecision(12);
    for (std::size_t i = 0; i < report.per_ring_mm.size(); ++i)
        out << i << ',' << report.axial_m[i] << ',' << report.per_ring_mm[i] << ','
            << report.counts[i] << '\n';
    if (!out) raise(ErrorKind::IoFailure, "write failed for " + path);
}

void write_defects_csv(const std::vector<DefectRegion>& regions, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorKind::IoFailure, "cannot write " + path);
    out << "region,axial_min_m,axial_max_m,angle_min_rad,angle_max_rad,peak_deviation_mm,sign,points\n";
    out << std::setprecision(12);
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const DefectRegion& r = regions[i];
        out << i << ',' << r.axial_min << ',' << r.axial_max << ',' << r.angle_min << ','
            << r.angle_max << ',' << r.peak_deviation_mm << ',' << r.sign << ',' << r.point_count
            << '\n';
    }
    if (!out) raise(ErrorKind::IoFailure, "write failed for " + path);
}

} // namespace pipescan
