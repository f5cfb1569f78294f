#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tactile/acquire.hpp"
#include "tactile/grid_plan.hpp"
#include "tactile/interrogation.hpp"
#include "tactile/mechprops.hpp"
#include "tactile/phantom.hpp"
#include "tactile/press_env.hpp"
#include "tactile/sac.hpp"

namespace tactile {

// One config file drives every pipeline phase. The defaults reproduce the
// two-inclusion interrogation experiment at the reduced sensor profile.
struct ExperimentConfig {
    static constexpr int kSchemaVersion = 1;

    std::uint64_t seed = 1;
    std::string profile = "reduced";        // "full" or "reduced"

    PhantomSpec phantom;                    // interrogation specimen
    SensorConfig sensor;                    // dims/scale set by profile unless overridden

    RoiSpec roi;
    double grid_dx_mm = 15.0;
    double grid_dy_mm = 15.0;
    double coarse_press_force_n = 5.0;

    double min_region_diameter_mm = 3.0;    // converted to px per profile
    double binarize_threshold = -1.0;       // < 0 => auto (background mean + 3 sigma)

    FiConfig fine;
    double merge_threshold_mm = 6.0;

    AcquireConfig window;                   // recording force window

    SacHyper agent;
    int training_episodes = 300;
    double training_diameter_mm = 15.3;
    double training_elasticity_kpa = 94.4;
    double training_layer_depth_mm = 6.0;
    PressEnvConfig env;                     // press_xy filled at runtime

    struct CalibrationPiece {
        double diameter_mm = 0.0;
        double elasticity_kpa = 0.0;
    };
    std::vector<CalibrationPiece> calibration_pieces;
    double calibration_layer_depth_mm = 6.0;
    std::vector<double> calibration_forces_n;
    bool calibration_uses_model = false;    // scripted sweep by default

    RiskWeights risk;

    struct CharacterizeTarget {
        double diameter_mm = 0.0;
        double elasticity_kpa = 0.0;
        double layer_depth_mm = 6.0;
    };
    std::vector<CharacterizeTarget> characterize_targets;

    std::string persist_frames = "characterization";   // all | characterization | none

    static ExperimentConfig defaults();

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const;
    static ExperimentConfig load(const std::filesystem::path& path);

    // FNV-1a over the canonical serialization.
    std::string digest() const;

    // Sensor config with profile dimensions and the experiment seed applied.
    SensorConfig make_sensor(std::uint64_t stream_seed) const;
    double min_region_diameter_px() const;
    DetectConfig make_detect(double threshold) const;

    void validate() const;
};

} // namespace tactile
