#pragma once

#include <cstdint>
#include <vector>

#include "tactile/simulator.hpp"

namespace tactile {

struct DetectedRegion {
    Vec2 centroid_px;
    double equivalent_diameter_px = 0.0;   // 2 * sqrt(area / pi)
    std::uint64_t pixel_count = 0;
};

// 3x3 median filter; image borders are filtered over the in-bounds
// neighborhood.
std::vector<std::uint8_t> median_filter_3x3(const std::vector<std::uint8_t>& pixels,
                                            int width, int height);

// Detection pipeline: median filter, binarize at threshold (pixel >
// threshold), 8-connected component labeling, drop components whose
// equivalent diameter is below min_diameter_px. Result sorted by pixel count
// descending; ties broken by lower centroid row, then column.
std::vector<DetectedRegion> detect_regions(const TactileFrame& frame,
                                           double min_diameter_px,
                                           double binarize_threshold);

// mean + 3 sigma of a frame's pixel values; applied to a contact frame over
// bare background it gives the detection threshold.
double background_threshold(const TactileFrame& frame);

} // namespace tactile
