#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pipescan {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb&) const = default;
};

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    void set(int x, int y, std::uint8_t v) { data[static_cast<std::size_t>(y) * width + x] = v; }
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data; // interleaved r,g,b

    RgbImage() = default;
    RgbImage(int w, int h, Rgb fill = {}) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3) {
        for (std::size_t i = 0; i < data.size(); i += 3) {
            data[i] = fill.r;
            data[i + 1] = fill.g;
            data[i + 2] = fill.b;
        }
    }

    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    Rgb at(int x, int y) const {
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        return {data[i], data[i + 1], data[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
        data[i] = c.r;
        data[i + 1] = c.g;
        data[i + 2] = c.b;
    }
};

// Float working buffer used while compositing a render before quantization.
struct FloatImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    FloatImage() = default;
    FloatImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0f) {}

    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    float& ref(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Interpolated sampling with clamped borders.
double sample_bilinear(const GrayImage& img, double x, double y);
double sample_bicubic(const GrayImage& img, double x, double y); // Catmull-Rom
void sample_bilinear_rgb(const RgbImage& img, double x, double y, double out[3]);

// Binary PGM (P5) / PPM (P6), 8-bit.
void write_pgm(const GrayImage& img, const std::string& path);
GrayImage read_pgm(const std::string& path);
void write_ppm(const RgbImage& img, const std::string& path);
RgbImage read_ppm(const std::string& path);

// Between-class-variance threshold from the 256-bin histogram.
int otsu_threshold(const GrayImage& img);

} // namespace pipescan
