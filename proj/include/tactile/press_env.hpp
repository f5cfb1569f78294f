#pragma once

#include "tactile/sac.hpp"
#include "tactile/simulator.hpp"

namespace tactile {

// Maps probe positions to the network inputs and back. XY enters relative to
// the commanded press target (probe-centered sensing frame) so the pressing
// skill transfers to any location; Z is absolute. Inversion needs the same
// reference target.
struct ObsNormalizer {
    Vec2 reference_xy{0.0, 0.0};
    double xy_half_range_mm = 100.0;   // offsets are a few mm of arm tolerance
    double z_lo_mm = -40.0;
    double z_hi_mm = 40.0;

    EnvObservation observe(const Vec3& pos_mm) const;
    Vec3 denormalize(const std::array<double, 3>& n) const;
};

struct PressEnvConfig {
    Vec2 press_xy{82.55, 107.95};   // over the training inclusion
    double z_start_mm = 15.0;       // resets span [4, 26] mm above the surface
    double z_start_jitter_mm = 11.0;
    double step_mm = 1.0;
    double window_lo_n = 1.0;
    double window_hi_n = 10.0;      // doubles as the safety cutoff
    int max_steps = 100;
    int plateau_steps = 5;
    double z_min_mm = -40.0;
    double z_max_mm = 40.0;
};

// Single-press episode over one XY spot: the agent moves the probe up or
// down one step at a time; reward is the frame's mean pixel intensity.
// Episodes end on the step budget, on a force above the window top (reward 0
// for that step), or after plateau_steps consecutive in-window readings.
class PressEnv : public Environment {
public:
    PressEnv(TactileSimulator& sim, const PressEnvConfig& config, std::uint64_t reset_seed);

    EnvObservation reset() override;
    StepResult step(int action) override;
    int max_episode_steps() const override { return config_.max_steps; }

    const ObsNormalizer& normalizer() const { return normalizer_; }
    const PressEnvConfig& config() const { return config_; }
    double last_force_n() const { return last_force_n_; }

private:
    TactileSimulator& sim_;
    PressEnvConfig config_;
    ObsNormalizer normalizer_;
    Rng reset_rng_;
    int steps_ = 0;
    int in_window_streak_ = 0;
    double last_force_n_ = 0.0;
};

} // namespace tactile
