#pragma once

#include <vector>

#include "tactile/press_env.hpp"
#include "tactile/sac.hpp"
#include "tactile/simulator.hpp"

namespace tactile {

// Frames recorded inside the force window during one press, ordered by
// frame index with non-decreasing contact depth.
struct FrameSequence {
    std::vector<TactileFrame> frames;
    double window_lo_n = 0.0;
    double window_hi_n = 0.0;
    std::size_t reference_index = 0;   // lowest-force frame, set by consumers

    std::vector<double> forces() const;
    std::vector<double> pixel_sums() const;
};

struct AcquireConfig {
    double window_lo_n = 1.0;
    double window_hi_n = 10.0;
    double step_mm = 1.0;
    double travel_z_mm = 25.0;
    int max_steps = 60;
};

// Greedy rollout of a trained policy over one XY target. Frames whose force
// reading falls inside [lo, hi] are recorded during the descent; acquisition
// stops when the force passes the window top (that frame is discarded), when
// the policy pulls up after recording began, or at the step budget.
// Throws NoContact if nothing was recorded.
FrameSequence acquire_sequence(TactileSimulator& sim, const SacAgent& agent,
                               const ObsNormalizer& normalizer, const Vec2& xy_mm,
                               const AcquireConfig& config);

// Policy-free acquisition used by calibration sweeps: presses to each target
// force in turn and records one frame there. Forces outside the window are
// skipped. Throws NoContact if nothing was recorded.
FrameSequence scripted_sequence(TactileSimulator& sim, const Vec2& xy_mm,
                                const std::vector<double>& target_forces_n,
                                const AcquireConfig& config);

} // namespace tactile
