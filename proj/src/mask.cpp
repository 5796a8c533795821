#include "pipescan/mask.hpp"

#include <algorithm>
#include <array>

#include "pipescan/errors.hpp"
#include "pipescan/parallel.hpp"

namespace pipescan {

std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (const std::uint8_t v : data) n += v;
    return n;
}

BinaryMask threshold_image_serial(const GrayImage& image, int threshold) {
    BinaryMask mask(image.width, image.height);
    for (std::size_t i = 0; i < image.data.size(); ++i)
        mask.data[i] = image.data[i] >= threshold ? 1 : 0;
    return mask;
}

BinaryMask threshold_image_omp(const GrayImage& image, int threshold) {
    BinaryMask mask(image.width, image.height);
    const long long n = static_cast<long long>(image.data.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) mask.data[i] = image.data[i] >= threshold ? 1 : 0;
    return mask;
}

namespace {

struct Box {
    int x0, y0, x1, y1; // inclusive
    bool empty = true;
};

Box mask_bbox(const BinaryMask& m) {
    Box b{m.width, m.height, -1, -1, true};
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x)
            if (m.at(x, y)) {
                b.x0 = std::min(b.x0, x);
                b.y0 = std::min(b.y0, y);
                b.x1 = std::max(b.x1, x);
                b.y1 = std::max(b.y1, y);
                b.empty = false;
            }
    if (!b.empty) {
        b.x0 = std::max(0, b.x0 - 1);
        b.y0 = std::max(0, b.y0 - 1);
        b.x1 = std::min(m.width - 1, b.x1 + 1);
        b.y1 = std::min(m.height - 1, b.y1 + 1);
    }
    return b;
}

// Zhang-Suen deletability for the given subiteration phase, evaluated on the
// state at the start of the pass.
inline bool zs_deletable(const BinaryMask& m, int x, int y, int phase) {
    if (!m.at(x, y)) return false;
    if (x <= 0 || y <= 0 || x >= m.width - 1 || y >= m.height - 1) return false;
    const int p2 = m.at(x, y - 1), p3 = m.at(x + 1, y - 1), p4 = m.at(x + 1, y);
    const int p5 = m.at(x + 1, y + 1), p6 = m.at(x, y + 1), p7 = m.at(x - 1, y + 1);
    const int p8 = m.at(x - 1, y), p9 = m.at(x - 1, y - 1);
    const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
    if (b < 2 || b > 6) return false; // b < 2 also protects arc endpoints
    const std::array<int, 9> seq{p2, p3, p4, p5, p6, p7, p8, p9, p2};
    int transitions = 0;
    for (int i = 0; i < 8; ++i)
        if (seq[i] == 0 && seq[i + 1] == 1) ++transitions;
    if (transitions != 1) return false;
    if (phase == 0) return (p2 * p4 * p6) == 0 && (p4 * p6 * p8) == 0;
    return (p2 * p4 * p8) == 0 && (p2 * p6 * p8) == 0;
}

} // namespace

void thin_mask_serial(BinaryMask& mask) {
    const Box box = mask_bbox(mask);
    if (box.empty) return;
    BinaryMask snapshot = mask;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int phase = 0; phase < 2; ++phase) {
            snapshot.data = mask.data;
            for (int y = box.y0; y <= box.y1; ++y)
                for (int x = box.x0; x <= box.x1; ++x)
                    if (zs_deletable(snapshot, x, y, phase)) {
                        mask.set(x, y, 0);
                        changed = true;
                    }
        }
    }
}

void thin_mask_omp(BinaryMask& mask) {
    const Box box = mask_bbox(mask);
    if (box.empty) return;
    BinaryMask snapshot = mask;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int phase = 0; phase < 2; ++phase) {
            snapshot.data = mask.data;
            bool phase_changed = false;
#pragma omp parallel for schedule(static) reduction(|| : phase_changed)
            for (int y = box.y0; y <= box.y1; ++y)
                for (int x = box.x0; x <= box.x1; ++x)
                    if (zs_deletable(snapshot, x, y, phase)) {
                        mask.set(x, y, 0);
                        phase_changed = true;
                    }
            changed = changed || phase_changed;
        }
    }
}

void thin_mask(BinaryMask& mask) {
    if (parallel_enabled())
        thin_mask_omp(mask);
    else
        thin_mask_serial(mask);
}

BinaryMask extract_mask(const GrayImage& image, int threshold, bool thinning, int min_pixels) {
    BinaryMask mask = parallel_enabled() ? threshold_image_omp(image, threshold)
                                         : threshold_image_serial(image, threshold);
    if (mask.count() < static_cast<std::size_t>(min_pixels))
        raise(ErrorKind::EmptyMask, "fewer than " + std::to_string(min_pixels) +
                                        " pixels above threshold " + std::to_string(threshold));
    if (thinning) thin_mask(mask);
    return mask;
}

void write_mask_pgm(const BinaryMask& mask, const std::string& path) {
    GrayImage img(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.data.size(); ++i) img.data[i] = mask.data[i] ? 255 : 0;
    write_pgm(img, path);
}

} // namespace pipescan
