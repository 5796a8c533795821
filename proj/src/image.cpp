#include "pipescan/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "pipescan/errors.hpp"

namespace pipescan {

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

inline double catmull_rom(double p0, double p1, double p2, double p3, double t) {
    return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                          t * (3.0 * (p1 - p2) + p3 - p0)));
}

} // namespace

double sample_bilinear(const GrayImage& img, double x, double y) {
    const int x0 = clampi(static_cast<int>(std::floor(x)), 0, img.width - 1);
    const int y0 = clampi(static_cast<int>(std::floor(y)), 0, img.height - 1);
    const int x1 = clampi(x0 + 1, 0, img.width - 1);
    const int y1 = clampi(y0 + 1, 0, img.height - 1);
    const double fx = std::clamp(x - x0, 0.0, 1.0);
    const double fy = std::clamp(y - y0, 0.0, 1.0);
    const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
    const double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

double sample_bicubic(const GrayImage& img, double x, double y) {
    const int ix = static_cast<int>(std::floor(x));
    const int iy = static_cast<int>(std::floor(y));
    const double fx = x - ix;
    const double fy = y - iy;
    std::array<double, 4> col;
    for (int j = -1; j <= 2; ++j) {
        const int yy = clampi(iy + j, 0, img.height - 1);
        const double p0 = img.at(clampi(ix - 1, 0, img.width - 1), yy);
        const double p1 = img.at(clampi(ix, 0, img.width - 1), yy);
        const double p2 = img.at(clampi(ix + 1, 0, img.width - 1), yy);
        const double p3 = img.at(clampi(ix + 2, 0, img.width - 1), yy);
        col[j + 1] = catmull_rom(p0, p1, p2, p3, fx);
    }
    return catmull_rom(col[0], col[1], col[2], col[3], fy);
}

void sample_bilinear_rgb(const RgbImage& img, double x, double y, double out[3]) {
    const int x0 = clampi(static_cast<int>(std::floor(x)), 0, img.width - 1);
    const int y0 = clampi(static_cast<int>(std::floor(y)), 0, img.height - 1);
    const int x1 = clampi(x0 + 1, 0, img.width - 1);
    const int y1 = clampi(y0 + 1, 0, img.height - 1);
    const double fx = std::clamp(x - x0, 0.0, 1.0);
    const double fy = std::clamp(y - y0, 0.0, 1.0);
    const Rgb c00 = img.at(x0, y0), c10 = img.at(x1, y0), c01 = img.at(x0, y1), c11 = img.at(x1, y1);
    const double ch00[3] = {double(c00.r), double(c00.g), double(c00.b)};
    const double ch10[3] = {double(c10.r), double(c10.g), double(c10.b)};
    const double ch01[3] = {double(c01.r), double(c01.g), double(c01.b)};
    const double ch11[3] = {double(c11.r), double(c11.g), double(c11.b)};
    for (int c = 0; c < 3; ++c) {
        const double top = ch00[c] * (1.0 - fx) + ch10[c] * fx;
        const double bot = ch01[c] * (1.0 - fx) + ch11[c] * fx;
        out[c] = top * (1.0 - fy) + bot * fy;
    }
}

namespace {

void write_pnm_header(std::ofstream& out, const char* magic, int w, int h) {
    out << magic << "\n" << w << " " << h << "\n255\n";
}

void read_pnm_header(std::ifstream& in, const char* magic, int& w, int& h, const std::string& path) {
    std::string tag;
    in >> tag;
    if (tag != magic) raise(ErrorKind::IoFailure, path + ": not a " + std::string(magic) + " file");
    // Skip comments between header tokens.
    auto next_int = [&](int& v) {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            v = std::stoi(tok);
            return;
        }
        raise(ErrorKind::IoFailure, path + ": truncated header");
    };
    int maxval = 0;
    next_int(w);
    next_int(h);
    next_int(maxval);
    if (maxval != 255) raise(ErrorKind::IoFailure, path + ": only 8-bit images supported");
    in.get(); // single whitespace before the raster
}

} // namespace

void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::IoFailure, "cannot write " + path);
    write_pnm_header(out, "P5", img.width, img.height);
    out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (!out) raise(ErrorKind::IoFailure, "write failed for " + path);
}

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::IoFailure, "cannot open " + path);
    int w = 0, h = 0;
    read_pnm_header(in, "P5", w, h, path);
    GrayImage img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.data.size()))
        raise(ErrorKind::IoFailure, path + ": truncated raster");
    return img;
}

void write_ppm(const RgbImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::IoFailure, "cannot write " + path);
    write_pnm_header(out, "P6", img.width, img.height);
    out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (!out) raise(ErrorKind::IoFailure, "write failed for " + path);
}

RgbImage read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::IoFailure, "cannot open " + path);
    int w = 0, h = 0;
    read_pnm_header(in, "P6", w, h, path);
    RgbImage img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.data.size()))
        raise(ErrorKind::IoFailure, path + ": truncated raster");
    return img;
}

int otsu_threshold(const GrayImage& img) {
    std::array<long long, 256> hist{};
    for (const std::uint8_t v : img.data) ++hist[v];
    const long long total = static_cast<long long>(img.data.size());
    if (total == 0) return 0;

    double sum_all = 0.0;
    for (int i = 0; i < 256; ++i) sum_all += static_cast<double>(i) * hist[i];

    double sum_b = 0.0;
    long long w_b = 0;
    double best_var = -1.0;
    int best_t = 0;
    for (int t = 0; t < 256; ++t) {
        w_b += hist[t];
        if (w_b == 0) continue;
        const long long w_f = total - w_b;
        if (w_f == 0) break;
        sum_b += static_cast<double>(t) * hist[t];
        const double m_b = sum_b / w_b;
        const double m_f = (sum_all - sum_b) / w_f;
        const double between = static_cast<double>(w_b) * w_f * (m_b - m_f) * (m_b - m_f);
        if (between > best_var) {
            best_var = between;
            best_t = t;
        }
    }
    return best_t + 1; // first intensity classified as foreground
}

} // namespace pipescan
