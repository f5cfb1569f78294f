#include "tactile/phantom.hpp"

#include <string>

#include "tactile/errors.hpp"

namespace tactile {

void PhantomSpec::validate() const {
    if (extent_mm.x <= 0.0 || extent_mm.y <= 0.0)
        throw ConfigError("phantom extent must be positive");
    if (inclusion_layer_depth_mm < 0.0)
        throw ConfigError("inclusion layer depth must be >= 0");
    if (background_stiffness_kpa <= 0.0)
        throw ConfigError("background stiffness must be positive");
    for (std::size_t i = 0; i < inclusions.size(); ++i) {
        const auto& inc = inclusions[i];
        if (inc.diameter_mm <= 0.0)
            throw ConfigError("inclusion " + std::to_string(i) + ": diameter must be positive");
        if (inc.elasticity_kpa <= 0.0)
            throw ConfigError("inclusion " + std::to_string(i) + ": elasticity must be positive");
        if (inc.center_roi.z > 0.0)
            throw ConfigError("inclusion " + std::to_string(i) + ": center z must be <= 0 (below surface)");
        if (!contains_xy(inc.center_roi.xy()))
            throw ConfigError("inclusion " + std::to_string(i) + ": center outside phantom extent");
    }
    for (std::size_t i = 0; i < inclusions.size(); ++i) {
        for (std::size_t j = i + 1; j < inclusions.size(); ++j) {
            double d = distance(inclusions[i].center_roi.xy(), inclusions[j].center_roi.xy());
            if (d < inclusions[i].radius_mm() + inclusions[j].radius_mm())
                throw ConfigError("inclusions " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
        }
    }
}

void SensorConfig::validate() const {
    if (image_width <= 0 || image_height <= 0)
        throw ConfigError("image dimensions must be positive");
    if (mm_per_pixel <= 0.0)
        throw ConfigError("mm_per_pixel must be positive");
    if (max_force_n <= 0.0 || max_force_n > 50.0)
        throw ConfigError("max_force must be in (0, 50] N");
    if (force_noise_sd_n < 0.0 || intensity_noise_sd < 0.0 || pos_noise_bound_mm < 0.0)
        throw ConfigError("noise magnitudes must be >= 0");
    if (probe_radius_mm <= 0.0 || spring_base_n_per_mm <= 0.0)
        throw ConfigError("contact model constants must be positive");
    if (intensity_gain <= 0.0 || sigma_per_diameter <= 0.0 || depth_decay_mm <= 0.0 ||
        elasticity_ref_kpa <= 0.0 || elasticity_exponent <= 0.0)
        throw ConfigError("intensity model constants must be positive");
}

SensorConfig SensorConfig::full_profile() {
    return SensorConfig{};
}

SensorConfig SensorConfig::reduced_profile() {
    SensorConfig cfg;
    cfg.image_width = 320;
    cfg.image_height = 256;
    cfg.mm_per_pixel = 0.12;
    return cfg;
}

} // namespace tactile
