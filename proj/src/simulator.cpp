#include "tactile/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tactile/errors.hpp"

namespace tactile {

double TactileFrame::pixel_sum() const {
    double s = 0.0;
    for (std::uint8_t p : pixels) s += p;
    return s;
}

Vec2 TactileFrame::centroid_px() const {
    double sum = 0.0, su = 0.0, sv = 0.0;
    for (int v = 0; v < height; ++v) {
        const std::uint8_t* row = pixels.data() + static_cast<std::size_t>(v) * width;
        for (int u = 0; u < width; ++u) {
            double p = row[u];
            sum += p;
            su += p * u;
            sv += p * v;
        }
    }
    if (sum <= 0.0) return {0.5 * (width - 1), 0.5 * (height - 1)};
    return {su / sum, sv / sum};
}

TactileSimulator::TactileSimulator(PhantomSpec phantom, SensorConfig config)
    : phantom_(std::move(phantom)), config_(config), rng_(config.rng_seed) {
    phantom_.validate();
    config_.validate();
}

void TactileSimulator::move_to(const Vec3& target_mm) {
    if (!phantom_.contains_xy(target_mm.xy()))
        throw OutOfRoi("probe target (" + std::to_string(target_mm.x) + ", " +
                       std::to_string(target_mm.y) + ") outside phantom extent");

    bool repositioned = target_mm.x != probe_.commanded_mm.x ||
                        target_mm.y != probe_.commanded_mm.y ||
                        target_mm.z != probe_.commanded_mm.z;
    probe_.commanded_mm = target_mm;
    if (repositioned) {
        // Positional noise realizes on every approach move; a pure Z press
        // (step_probe with zero XY delta) keeps the offset it landed with.
        double b = config_.pos_noise_bound_mm;
        probe_.actual_mm.x = target_mm.x + (b > 0.0 ? rng_.uniform(-b, b) : 0.0);
        probe_.actual_mm.y = target_mm.y + (b > 0.0 ? rng_.uniform(-b, b) : 0.0);
    }
    probe_.actual_mm.z = target_mm.z;
    probe_.contact_depth_mm = std::max(0.0, phantom_.surface_z_mm - target_mm.z);
}

void TactileSimulator::step_probe(const Vec3& delta_mm) {
    Vec3 target{probe_.commanded_mm.x + delta_mm.x,
                probe_.commanded_mm.y + delta_mm.y,
                probe_.commanded_mm.z + delta_mm.z};
    // Preserve the realized XY offset across Z-only steps.
    if (delta_mm.x == 0.0 && delta_mm.y == 0.0) {
        probe_.commanded_mm.z = target.z;
        probe_.actual_mm.z = target.z;
        probe_.contact_depth_mm = std::max(0.0, phantom_.surface_z_mm - target.z);
        return;
    }
    move_to(target);
}

double TactileSimulator::inclusion_overlap(const Vec2& probe_xy, const InclusionSpec& inc) const {
    double r = inc.radius_mm();
    double R = config_.probe_radius_mm;
    double d = distance(probe_xy, inc.center_roi.xy());
    if (d >= r + R) return 0.0;
    double lens;
    if (d <= std::abs(R - r)) {
        double rm = std::min(r, R);
        lens = M_PI * rm * rm;
    } else {
        double a1 = std::acos(std::clamp((d * d + r * r - R * R) / (2.0 * d * r), -1.0, 1.0));
        double a2 = std::acos(std::clamp((d * d + R * R - r * r) / (2.0 * d * R), -1.0, 1.0));
        double k = (-d + r + R) * (d + r - R) * (d - r + R) * (d + r + R);
        lens = r * r * a1 + R * R * a2 - 0.5 * std::sqrt(std::max(0.0, k));
    }
    return lens / (M_PI * R * R);
}

double TactileSimulator::effective_spring(const Vec2& xy_mm) const {
    double blend = 0.0;
    for (const auto& inc : phantom_.inclusions)
        blend += inclusion_overlap(xy_mm, inc) * inc.elasticity_kpa / phantom_.background_stiffness_kpa;
    return config_.spring_base_n_per_mm * (1.0 + config_.stiffness_gain * blend);
}

double TactileSimulator::contact_force(const Vec2& xy_mm, double contact_depth_mm) const {
    if (contact_depth_mm <= 0.0) return 0.0;
    return effective_spring(xy_mm) * contact_depth_mm;
}

double TactileSimulator::applied_force() {
    double f = contact_force(probe_.actual_mm.xy(), probe_.contact_depth_mm);
    if (config_.force_noise_sd_n > 0.0) f += rng_.gaussian(0.0, config_.force_noise_sd_n);
    return std::clamp(f, 0.0, config_.max_force_n);
}

TactileFrame TactileSimulator::render_frame() {
    const int w = config_.image_width;
    const int h = config_.image_height;
    const double s = config_.mm_per_pixel;
    const Vec2 window_center = probe_.actual_mm.xy();

    static thread_local std::vector<double> accum;
    accum.assign(static_cast<std::size_t>(w) * h, 0.0);

    // Deformation intensity follows the noiseless contact force; the frame's
    // recorded force reading gets its own sensor noise below.
    double f_true = contact_force(window_center, probe_.contact_depth_mm);

    if (f_true > 0.0) {
        for (const auto& inc : phantom_.inclusions) {
            double depth = -inc.center_roi.z + phantom_.inclusion_layer_depth_mm;
            double amp = config_.intensity_gain * f_true *
                         std::pow(inc.elasticity_kpa / config_.elasticity_ref_kpa,
                                  config_.elasticity_exponent) *
                         std::exp(-depth / config_.depth_decay_mm);
            double sigma = config_.sigma_per_diameter * inc.diameter_mm;
            double support = inc.radius_mm();   // deformation footprint = the disc itself

            // Bump center in pixel coordinates.
            double cu = 0.5 * (w - 1) + (inc.center_roi.x - window_center.x) / s;
            double cv = 0.5 * (h - 1) + (inc.center_roi.y - window_center.y) / s;
            double rp = support / s;
            int u0 = std::max(0, static_cast<int>(std::floor(cu - rp)));
            int u1 = std::min(w - 1, static_cast<int>(std::ceil(cu + rp)));
            int v0 = std::max(0, static_cast<int>(std::floor(cv - rp)));
            int v1 = std::min(h - 1, static_cast<int>(std::ceil(cv + rp)));
            if (u0 > u1 || v0 > v1) continue;

            double inv2s2 = 1.0 / (2.0 * sigma * sigma);
            for (int v = v0; v <= v1; ++v) {
                double dy = (v - cv) * s;
                double* row = accum.data() + static_cast<std::size_t>(v) * w;
                for (int u = u0; u <= u1; ++u) {
                    double dx = (u - cu) * s;
                    double r2 = dx * dx + dy * dy;
                    if (r2 > support * support) continue;
                    row[u] += amp * std::exp(-r2 * inv2s2);
                }
            }
        }
    }

    TactileFrame frame;
    frame.width = w;
    frame.height = h;
    frame.pixels.resize(accum.size());
    double noise_sd = config_.intensity_noise_sd;
    for (std::size_t i = 0; i < accum.size(); ++i) {
        double value = accum[i];
        if (noise_sd > 0.0) value += rng_.gaussian(0.0, noise_sd);
        frame.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0l, 255l));
    }

    frame.applied_force_n = applied_force();
    frame.probe_pose_mm = probe_.actual_mm;
    frame.frame_index = frame_counter_++;
    return frame;
}

TactileFrame TactileSimulator::press_and_capture(const Vec2& xy_mm, double target_force_n,
                                                 double descend_step_mm, double travel_z_mm) {
    move_to({xy_mm.x, xy_mm.y, travel_z_mm});
    double z = travel_z_mm;
    // Descend until the (noise-free) spring force reaches the target; the
    // controller reads its own force estimate, the frame records the noisy one.
    const double z_floor = phantom_.surface_z_mm - 60.0;
    while (z > z_floor) {
        double depth = std::max(0.0, phantom_.surface_z_mm - z);
        if (contact_force(probe_.actual_mm.xy(), depth) >= target_force_n) break;
        z -= descend_step_mm;
        step_probe({0.0, 0.0, -descend_step_mm});
    }
    return render_frame();
}

void TactileSimulator::retract(double travel_z_mm) {
    step_probe({0.0, 0.0, travel_z_mm - probe_.commanded_mm.z});
}

} // namespace tactile
