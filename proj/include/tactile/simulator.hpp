#pragma once

#include <cstdint>
#include <vector>

#include "tactile/phantom.hpp"
#include "tactile/rng.hpp"

namespace tactile {

// Probe pose bookkeeping. commanded is what the controller asked for; actual
// includes positional noise (XY only, Z is exact).
struct ProbeState {
    Vec3 commanded_mm{0.0, 0.0, 25.0};
    Vec3 actual_mm{0.0, 0.0, 25.0};
    double contact_depth_mm = 0.0;
};

// One tactile image plus the force reading taken with it.
struct TactileFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;   // row-major, 8-bit counts
    double applied_force_n = 0.0;
    Vec3 probe_pose_mm;                 // commanded pose at capture time
    std::uint64_t frame_index = 0;

    double pixel_sum() const;
    // Intensity centroid (u. v) in pixel coordinates; (=center) for an
    // all-zero image.
    Vec2 centroid_px() const;
};

// Forward model of the sensing probe pressing into a phantom. Owns the one
// RNG every noise source draws from; a fixed seed plus a fixed command
// sequence reproduces the frame stream bit for bit.
//
// Single-threaded use only; hand the instance between threads, never share.
class TactileSimulator {
public:
    TactileSimulator(PhantomSpec phantom, SensorConfig config);

    const PhantomSpec& phantom() const { return phantom_; }
    const SensorConfig& config() const { return config_; }
    const ProbeState& probe() const { return probe_; }
    std::uint64_t frames_rendered() const { return frame_counter_; }

    // Teleport-style absolute move; applies fresh positional noise.
    // Throws OutOfRoi when the XY target leaves the phantom extent.
    void move_to(const Vec3& target_mm);

    // Relative move by (dx, dy, dz).
    void step_probe(const Vec3& delta_mm);

    // Normal force for the current pose: k_eff * contact_depth plus force
    // noise, clamped to [0, max_force].
    double applied_force();

    // Noise-free spring force for an arbitrary XY/contact depth; used by the
    // force controller and by tests. No RNG consumed.
    double contact_force(const Vec2& xy_mm, double contact_depth_mm) const;

    // Effective spring constant at a probe XY (footprint-weighted blend of
    // background and inclusion stiffness).
    double effective_spring(const Vec2& xy_mm) const;

    // Render the tactile image for the current pose. Consumes force noise
    // (for the recorded reading) and one intensity-noise draw per pixel when
    // intensity noise is enabled.
    TactileFrame render_frame();

    // Descend from the travel height until the noise-free contact force
    // reaches target_n (or max_depth steps), then render a frame there.
    // Leaves the probe pressed; callers retract with move_to/retract().
    TactileFrame press_and_capture(const Vec2& xy_mm, double target_force_n,
                                   double descend_step_mm = 0.5,
                                   double travel_z_mm = 25.0);

    void retract(double travel_z_mm = 25.0);

private:
    double inclusion_overlap(const Vec2& probe_xy, const InclusionSpec& inc) const;

    PhantomSpec phantom_;
    SensorConfig config_;
    ProbeState probe_;
    Rng rng_;
    std::uint64_t frame_counter_ = 0;
};

} // namespace tactile
