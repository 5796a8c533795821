#pragma once

#include <cstdint>
#include <vector>

#include "pipescan/image.hpp"

namespace pipescan {

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // 0 or 1

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { data[static_cast<std::size_t>(y) * width + x] = v; }
    std::size_t count() const;
};

// Threshold (pixels >= threshold) and optionally thin the resulting band to
// a ridge of width <= 2 px while preserving 8-connectivity. Throws EmptyMask
// when fewer than min_pixels survive the threshold.
BinaryMask extract_mask(const GrayImage& image, int threshold, bool thinning,
                        int min_pixels = 64);

BinaryMask threshold_image_serial(const GrayImage& image, int threshold);
BinaryMask threshold_image_omp(const GrayImage& image, int threshold);

// Connectivity-preserving two-subiteration thinning (Zhang-Suen) run to its
// fixed point; open curve endpoints are kept so occluded arcs do not shrink.
void thin_mask(BinaryMask& mask);
void thin_mask_serial(BinaryMask& mask);
void thin_mask_omp(BinaryMask& mask);

void write_mask_pgm(const BinaryMask& mask, const std::string& path);

} // namespace pipescan
