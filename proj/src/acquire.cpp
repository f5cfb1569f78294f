#include "tactile/acquire.hpp"

#include <string>

#include "tactile/errors.hpp"

namespace tactile {

std::vector<double> FrameSequence::forces() const {
    std::vector<double> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(f.applied_force_n);
    return out;
}

std::vector<double> FrameSequence::pixel_sums() const {
    std::vector<double> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(f.pixel_sum());
    return out;
}

FrameSequence acquire_sequence(TactileSimulator& sim, const SacAgent& agent,
                               const ObsNormalizer& normalizer, const Vec2& xy_mm,
                               const AcquireConfig& config) {
    FrameSequence seq;
    seq.window_lo_n = config.window_lo_n;
    seq.window_hi_n = config.window_hi_n;

    ObsNormalizer centered = normalizer;
    centered.reference_xy = xy_mm;

    sim.move_to({xy_mm.x, xy_mm.y, config.travel_z_mm});
    for (int step = 0; step < config.max_steps; ++step) {
        EnvObservation obs = centered.observe(sim.probe().actual_mm);
        int action = agent.greedy_action(obs);
        if (action == kActionUp) {
            if (!seq.frames.empty()) break;   // press phase over
            sim.step_probe({0.0, 0.0, config.step_mm});
            continue;
        }
        sim.step_probe({0.0, 0.0, -config.step_mm});
        TactileFrame frame = sim.render_frame();
        if (frame.applied_force_n > config.window_hi_n) break;   // would leave the window
        if (frame.applied_force_n >= config.window_lo_n) seq.frames.push_back(std::move(frame));
    }
    sim.retract(config.travel_z_mm);

    if (seq.frames.empty())
        throw NoContact("no frame entered [" + std::to_string(config.window_lo_n) + ", " +
                        std::to_string(config.window_hi_n) + "] N at (" + std::to_string(xy_mm.x) +
                        ", " + std::to_string(xy_mm.y) + ")");
    return seq;
}

FrameSequence scripted_sequence(TactileSimulator& sim, const Vec2& xy_mm,
                                const std::vector<double>& target_forces_n,
                                const AcquireConfig& config) {
    FrameSequence seq;
    seq.window_lo_n = config.window_lo_n;
    seq.window_hi_n = config.window_hi_n;

    for (double target : target_forces_n) {
        TactileFrame frame = sim.press_and_capture(xy_mm, target, 0.25, config.travel_z_mm);
        if (frame.applied_force_n >= config.window_lo_n &&
            frame.applied_force_n <= config.window_hi_n)
            seq.frames.push_back(std::move(frame));
        sim.retract(config.travel_z_mm);
    }
    if (seq.frames.empty())
        throw NoContact("scripted sweep recorded no in-window frame at (" +
                        std::to_string(xy_mm.x) + ", " + std::to_string(xy_mm.y) + ")");
    return seq;
}

} // namespace tactile
