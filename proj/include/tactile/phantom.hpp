#pragma once

#include <cstdint>
#include <vector>

#include "tactile/geometry.hpp"

namespace tactile {

// One embedded body. Center is in the ROI frame; z <= 0 keeps it below the
// phantom surface.
struct InclusionSpec {
    Vec3 center_roi;                // mm
    double diameter_mm = 0.0;
    double elasticity_kpa = 0.0;

    double radius_mm() const { return 0.5 * diameter_mm; }
};

struct PhantomSpec {
    Vec2 extent_mm{165.1, 215.9};   // R_x, R_y
    double surface_z_mm = 0.0;
    double inclusion_layer_depth_mm = 6.0;
    double background_stiffness_kpa = 30.0;
    std::vector<InclusionSpec> inclusions;

    bool contains_xy(const Vec2& p) const {
        return p.x >= 0.0 && p.x <= extent_mm.x && p.y >= 0.0 && p.y <= extent_mm.y;
    }

    // Throws ConfigError on violated invariants (bad sizes, centers outside
    // the extent, overlapping inclusions, inclusions above the surface).
    void validate() const;
};

// Sensor + motion parameters. Amplitude/spring constants live here too since
// the rendering model is part of the simulated sensor, not the specimen.
struct SensorConfig {
    int image_width = 1280;
    int image_height = 1024;
    double mm_per_pixel = 0.03;

    double force_noise_sd_n = 0.0;
    double intensity_noise_sd = 0.0;
    double pos_noise_bound_mm = 0.0;
    double max_force_n = 50.0;      // sensor range cap
    std::uint64_t rng_seed = 1;

    // Contact model: k_eff = spring_base * (1 + stiffness_gain * overlap * E/E_bg)
    double spring_base_n_per_mm = 0.6;
    double stiffness_gain = 0.08;
    double probe_radius_mm = 15.0;

    // Intensity model: per-inclusion radial bump, amplitude
    // gain * F * (E/E_ref)^elasticity_exponent * exp(-depth/depth_decay),
    // width sigma = sigma_per_diameter * diameter, support capped at the
    // inclusion disc.
    double intensity_gain = 8.0;
    double sigma_per_diameter = 0.25;
    double depth_decay_mm = 20.0;
    double elasticity_ref_kpa = 100.0;
    double elasticity_exponent = 0.32;

    int pixel_count() const { return image_width * image_height; }
    double window_half_x_mm() const { return 0.5 * image_width * mm_per_pixel; }
    double window_half_y_mm() const { return 0.5 * image_height * mm_per_pixel; }

    void validate() const;

    // 1280x1024 at 0.03 mm/px, matching the reference camera.
    static SensorConfig full_profile();
    // 320x256 at 0.12 mm/px, same physical window, for fast runs.
    static SensorConfig reduced_profile();
};

} // namespace tactile
