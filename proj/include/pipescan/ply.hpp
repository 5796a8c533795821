#pragma once

#include <string>

#include "pipescan/pipemap.hpp"

namespace pipescan {

enum class PlyFormat { ascii, binary_little_endian };

// Standard PLY: float32 x,y,z + uchar r,g,b vertices, faces as uchar-counted
// int32 index lists. Binary output is bit-exact across runs for identical
// input. Throws IoFailure on write errors.
void export_ply(const TriangleMesh& mesh, const std::string& path, PlyFormat format);

// Point cloud view of a map (vertices + colors, no faces). A color override
// aligned with the rings (e.g. the heat map) replaces the per-point colors.
TriangleMesh cloud_from_map(const PipeMap& map,
                            const std::vector<std::vector<Rgb>>* color_override = nullptr);

} // namespace pipescan
