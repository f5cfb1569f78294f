#pragma once

#include <vector>

#include "tactile/geometry.hpp"

namespace tactile {

struct RoiSpec {
    Vec2 extent_mm{165.1, 215.9};
    RoiTransform transform{{0.6762, -0.1431, 0.1729}};
    Vec3 start_mm{38.25, 38.25, 25.0};

    void validate() const;   // start must be strictly inside the extent
};

// Raster coverage: rows advance in +X from the start, each row scanned in +Y
// from the start column.
struct GridPlan {
    double dx_mm = 0.0;
    double dy_mm = 0.0;
    std::vector<Vec2> waypoints;
};

// Throws DegenerateGrid when no waypoint fits, ConfigError on bad spacing.
GridPlan plan_grid(const RoiSpec& roi, double dx_mm, double dy_mm);

} // namespace tactile
