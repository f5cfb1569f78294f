#include "tactile/regions.hpp"

#include <algorithm>
#include <cmath>

namespace tactile {

std::vector<std::uint8_t> median_filter_3x3(const std::vector<std::uint8_t>& pixels,
                                            int width, int height) {
    std::vector<std::uint8_t> out(pixels.size());
    std::uint8_t window[9];
    for (int v = 0; v < height; ++v) {
        for (int u = 0; u < width; ++u) {
            int n = 0;
            for (int dv = -1; dv <= 1; ++dv) {
                int vv = v + dv;
                if (vv < 0 || vv >= height) continue;
                for (int du = -1; du <= 1; ++du) {
                    int uu = u + du;
                    if (uu < 0 || uu >= width) continue;
                    window[n++] = pixels[static_cast<std::size_t>(vv) * width + uu];
                }
            }
            std::nth_element(window, window + n / 2, window + n);
            out[static_cast<std::size_t>(v) * width + u] = window[n / 2];
        }
    }
    return out;
}

double background_threshold(const TactileFrame& frame) {
    double n = static_cast<double>(frame.pixels.size());
    double mean = frame.pixel_sum() / n;
    double ss = 0.0;
    for (std::uint8_t p : frame.pixels) {
        double d = p - mean;
        ss += d * d;
    }
    return mean + 3.0 * std::sqrt(ss / n);
}

std::vector<DetectedRegion> detect_regions(const TactileFrame& frame,
                                           double min_diameter_px,
                                           double binarize_threshold) {
    const int w = frame.width, h = frame.height;
    auto filtered = median_filter_3x3(frame.pixels, w, h);

    std::vector<std::uint8_t> mask(filtered.size());
    for (std::size_t i = 0; i < filtered.size(); ++i)
        mask[i] = filtered[i] > binarize_threshold ? 1 : 0;

    std::vector<DetectedRegion> regions;
    std::vector<std::size_t> stack;
    for (std::size_t seed = 0; seed < mask.size(); ++seed) {
        if (!mask[seed]) continue;
        // Flood fill one 8-connected component.
        std::uint64_t count = 0;
        double su = 0.0, sv = 0.0;
        stack.push_back(seed);
        mask[seed] = 0;
        while (!stack.empty()) {
            std::size_t idx = stack.back();
            stack.pop_back();
            int u = static_cast<int>(idx % w), v = static_cast<int>(idx / w);
            ++count;
            su += u;
            sv += v;
            for (int dv = -1; dv <= 1; ++dv) {
                int vv = v + dv;
                if (vv < 0 || vv >= h) continue;
                for (int du = -1; du <= 1; ++du) {
                    int uu = u + du;
                    if (uu < 0 || uu >= w) continue;
                    std::size_t nidx = static_cast<std::size_t>(vv) * w + uu;
                    if (mask[nidx]) {
                        mask[nidx] = 0;
                        stack.push_back(nidx);
                    }
                }
            }
        }
        DetectedRegion region;
        region.pixel_count = count;
        region.centroid_px = {su / count, sv / count};
        region.equivalent_diameter_px = 2.0 * std::sqrt(static_cast<double>(count) / M_PI);
        if (region.equivalent_diameter_px >= min_diameter_px) regions.push_back(region);
    }

    std::sort(regions.begin(), regions.end(), [](const DetectedRegion& a, const DetectedRegion& b) {
        if (a.pixel_count != b.pixel_count) return a.pixel_count > b.pixel_count;
        if (a.centroid_px.y != b.centroid_px.y) return a.centroid_px.y < b.centroid_px.y;
        return a.centroid_px.x < b.centroid_px.x;
    });
    return regions;
}

} // namespace tactile
