#pragma once

#include <cmath>

namespace tactile {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec2 xy() const { return {x, y}; }
};

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Fixed axis-aligned mapping between the millimetre ROI frame and the metre
// robot base frame. Only the origin is configurable; axes stay aligned.
struct RoiTransform {
    Vec3 origin_base;               // metres, position of ROI origin in base frame
    static constexpr double kMmPerMetre = 1000.0;

    Vec3 roi_to_base(const Vec3& roi_mm) const {
        return {origin_base.x + roi_mm.x / kMmPerMetre,
                origin_base.y + roi_mm.y / kMmPerMetre,
                origin_base.z + roi_mm.z / kMmPerMetre};
    }

    Vec3 base_to_roi(const Vec3& base_m) const {
        return {(base_m.x - origin_base.x) * kMmPerMetre,
                (base_m.y - origin_base.y) * kMmPerMetre,
                (base_m.z - origin_base.z) * kMmPerMetre};
    }
};

} // namespace tactile
