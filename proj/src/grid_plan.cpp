#include "tactile/grid_plan.hpp"

#include "tactile/errors.hpp"

namespace tactile {

void RoiSpec::validate() const {
    if (extent_mm.x <= 0.0 || extent_mm.y <= 0.0)
        throw ConfigError("ROI extent must be positive");
    if (start_mm.x <= 0.0 || start_mm.x >= extent_mm.x || start_mm.y <= 0.0 ||
        start_mm.y >= extent_mm.y)
        throw ConfigError("scan start must lie strictly inside the ROI");
}

GridPlan plan_grid(const RoiSpec& roi, double dx_mm, double dy_mm) {
    roi.validate();
    if (dx_mm <= 0.0 || dx_mm >= roi.extent_mm.x || dy_mm <= 0.0 || dy_mm >= roi.extent_mm.y)
        throw ConfigError("grid spacing must be positive and smaller than the ROI extent");

    GridPlan plan;
    plan.dx_mm = dx_mm;
    plan.dy_mm = dy_mm;
    // Rows advance in +X from the start; every row rescans +Y from the start
    // column. Waypoints stay strictly inside the extent.
    const double eps = 1e-9;
    for (double x = roi.start_mm.x; x < roi.extent_mm.x - eps; x += dx_mm)
        for (double y = roi.start_mm.y; y < roi.extent_mm.y - eps; y += dy_mm)
            plan.waypoints.push_back({x, y});

    if (plan.waypoints.empty())
        throw DegenerateGrid("no grid waypoint fits inside the ROI");
    return plan;
}

} // namespace tactile
