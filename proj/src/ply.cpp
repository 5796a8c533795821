#include "pipescan/ply.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pipescan {

namespace {

void append_le(std::string& buf, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    buf.push_back(static_cast<char>(bits & 0xff));
    buf.push_back(static_cast<char>((bits >> 8) & 0xff));
    buf.push_back(static_cast<char>((bits >> 16) & 0xff));
    buf.push_back(static_cast<char>((bits >> 24) & 0xff));
}

void append_le(std::string& buf, std::int32_t v) {
    const std::uint32_t bits = static_cast<std::uint32_t>(v);
    buf.push_back(static_cast<char>(bits & 0xff));
    buf.push_back(static_cast<char>((bits >> 8) & 0xff));
    buf.push_back(static_cast<char>((bits >> 16) & 0xff));
    buf.push_back(static_cast<char>((bits >> 24) & 0xff));
}

} // namespace

void export_ply(const TriangleMesh& mesh, const std::string& path, PlyFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::IoFailure, "cannot write " + path);

    out << "ply\n";
    out << (format == PlyFormat::ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n");
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "element face " << mesh.faces.size() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";

    const bool has_colors = mesh.colors.size() == mesh.vertices.size();
    if (format == PlyFormat::ascii) {
        std::ostringstream body;
        body << std::setprecision(9);
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            const Point3& p = mesh.vertices[i];
            const Rgb c = has_colors ? mesh.colors[i] : Rgb{200, 200, 200};
            body << static_cast<float>(p.x) << " " << static_cast<float>(p.y) << " "
                 << static_cast<float>(p.z) << " " << int(c.r) << " " << int(c.g) << " "
                 << int(c.b) << "\n";
        }
        for (const auto& f : mesh.faces) body << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
        out << body.str();
    } else {
        std::string buf;
        buf.reserve(mesh.vertices.size() * 15 + mesh.faces.size() * 13);
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
            const Point3& p = mesh.vertices[i];
            const Rgb c = has_colors ? mesh.colors[i] : Rgb{200, 200, 200};
            append_le(buf, static_cast<float>(p.x));
            append_le(buf, static_cast<float>(p.y));
            append_le(buf, static_cast<float>(p.z));
            buf.push_back(static_cast<char>(c.r));
            buf.push_back(static_cast<char>(c.g));
            buf.push_back(static_cast<char>(c.b));
        }
        for (const auto& f : mesh.faces) {
            buf.push_back(3);
            append_le(buf, static_cast<std::int32_t>(f[0]));
            append_le(buf, static_cast<std::int32_t>(f[1]));
            append_le(buf, static_cast<std::int32_t>(f[2]));
        }
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) raise(ErrorKind::IoFailure, "write failed for " + path);
}

TriangleMesh cloud_from_map(const PipeMap& map,
                            const std::vector<std::vector<Rgb>>* color_override) {
    TriangleMesh cloud;
    for (std::size_t i = 0; i < map.rings.size(); ++i) {
        const RingProfile& ring = map.rings[i];
        for (std::size_t j = 0; j < ring.points.size(); ++j) {
            cloud.vertices.push_back(ring.points[j].p);
            if (color_override)
                cloud.colors.push_back((*color_override)[i][j]);
            else
                cloud.colors.push_back(ring.points[j].color);
        }
    }
    return cloud;
}

} // namespace pipescan
