#include "tactile/press_env.hpp"

#include <algorithm>

namespace tactile {

EnvObservation ObsNormalizer::observe(const Vec3& pos_mm) const {
    EnvObservation obs;
    obs.position_mm = {pos_mm.x, pos_mm.y, pos_mm.z};
    obs.normalized = {(pos_mm.x - reference_xy.x) / xy_half_range_mm,
                      (pos_mm.y - reference_xy.y) / xy_half_range_mm,
                      2.0 * (pos_mm.z - z_lo_mm) / (z_hi_mm - z_lo_mm) - 1.0};
    return obs;
}

Vec3 ObsNormalizer::denormalize(const std::array<double, 3>& n) const {
    return {reference_xy.x + n[0] * xy_half_range_mm,
            reference_xy.y + n[1] * xy_half_range_mm,
            z_lo_mm + 0.5 * (n[2] + 1.0) * (z_hi_mm - z_lo_mm)};
}

PressEnv::PressEnv(TactileSimulator& sim, const PressEnvConfig& config, std::uint64_t reset_seed)
    : sim_(sim), config_(config), reset_rng_(reset_seed) {
    normalizer_.reference_xy = config.press_xy;
    normalizer_.z_lo_mm = config.z_min_mm;
    normalizer_.z_hi_mm = config.z_max_mm;
}

EnvObservation PressEnv::reset() {
    steps_ = 0;
    in_window_streak_ = 0;
    last_force_n_ = 0.0;
    double j = config_.z_start_jitter_mm;
    double z = config_.z_start_mm + (j > 0.0 ? reset_rng_.uniform(-j, j) : 0.0);
    sim_.move_to({config_.press_xy.x, config_.press_xy.y, z});
    return normalizer_.observe(sim_.probe().actual_mm);
}

StepResult PressEnv::step(int action) {
    ++steps_;
    double dz = action == kActionDown ? -config_.step_mm : config_.step_mm;
    double z = std::clamp(sim_.probe().commanded_mm.z + dz, config_.z_min_mm, config_.z_max_mm);
    sim_.step_probe({0.0, 0.0, z - sim_.probe().commanded_mm.z});

    TactileFrame frame = sim_.render_frame();
    last_force_n_ = frame.applied_force_n;

    StepResult result;
    result.obs = normalizer_.observe(sim_.probe().actual_mm);

    if (frame.applied_force_n > config_.window_hi_n) {
        // Safety cutoff: the one true terminal, no reward for the
        // overshooting step.
        result.reward = 0.0;
        result.done = true;
        return result;
    }

    result.reward = frame.pixel_sum() / sim_.config().pixel_count();

    if (frame.applied_force_n >= config_.window_lo_n)
        ++in_window_streak_;
    else
        in_window_streak_ = 0;

    // Budget and success-plateau endings are truncations, not terminals.
    if (steps_ >= config_.max_steps || in_window_streak_ >= config_.plateau_steps) {
        result.done = true;
        result.truncated = true;
    }
    return result;
}

} // namespace tactile
