#include "tactile/interrogation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tactile/errors.hpp"

namespace tactile {

CoarseResult coarse_interrogate(TactileSimulator& sim, const GridPlan& plan,
                                double press_force_n, const DetectConfig& detect,
                                double travel_z_mm) {
    if (plan.waypoints.empty()) throw DegenerateGrid("coarse interrogation needs a non-empty plan");

    CoarseResult result;
    result.visits.reserve(plan.waypoints.size());
    for (const Vec2& wp : plan.waypoints) {
        TactileFrame frame = sim.press_and_capture(wp, press_force_n, 0.5, travel_z_mm);
        sim.retract(travel_z_mm);

        auto regions = detect_regions(frame, detect.min_diameter_px, detect.binarize_threshold);

        WaypointResult visit;
        visit.waypoint_mm = wp;
        visit.region_count = static_cast<int>(regions.size());
        visit.largest_diameter_px = regions.empty() ? 0.0 : regions.front().equivalent_diameter_px;
        visit.pixel_sum = frame.pixel_sum();
        visit.flagged = !regions.empty();
        result.visits.push_back(visit);

        if (visit.flagged)
            result.candidates.push_back({wp, CandidateLocation::Source::kCoarse, 0});
    }
    return result;
}

namespace {

Vec2 clamp_into_extent(const Vec2& p, const Vec2& extent) {
    return {std::clamp(p.x, 0.0, extent.x), std::clamp(p.y, 0.0, extent.y)};
}

} // namespace

CandidateLocation refine_location(TactileSimulator& sim, const CandidateLocation& candidate,
                                  const FiConfig& config, const DetectConfig& detect,
                                  RefineTrace* trace) {
    const Vec2 extent = sim.phantom().extent_mm;
    const double mmpp = sim.config().mm_per_pixel;
    Vec2 cmd = clamp_into_extent(candidate.xy_mm, extent);

    for (int iter = 1; iter <= config.max_iters; ++iter) {
        TactileFrame frame = sim.press_and_capture(cmd, config.constant_force_n, 0.5, config.travel_z_mm);
        sim.retract(config.travel_z_mm);

        auto regions = detect_regions(frame, detect.min_diameter_px, detect.binarize_threshold);

        RefineIteration it;
        it.iteration = iter;
        it.commanded_xy_mm = cmd;
        it.region_found = !regions.empty();

        if (regions.empty()) {
            if (trace) {
                trace->iterations.push_back(it);
                trace->error = "lost target";
            }
            throw LostTarget("no region at (" + std::to_string(cmd.x) + ", " +
                             std::to_string(cmd.y) + ") after " + std::to_string(iter) +
                             " iteration(s)");
        }

        const DetectedRegion& largest = regions.front();
        double du = largest.centroid_px.x - 0.5 * (frame.width - 1);
        double dv = largest.centroid_px.y - 0.5 * (frame.height - 1);
        it.offset_px = std::hypot(du, dv);
        it.offset_mm = it.offset_px * mmpp;
        if (trace) trace->iterations.push_back(it);

        // The measured centroid, placed relative to the pose the robot
        // reported for this frame, is the current center estimate; it doubles
        // as the next approach command while the offset stays above threshold.
        Vec2 base = frame.probe_pose_mm.xy();
        Vec2 center_est = clamp_into_extent({base.x + du * mmpp, base.y + dv * mmpp}, extent);

        if (it.offset_mm < config.threshold_mm()) {
            CandidateLocation refined{center_est, CandidateLocation::Source::kRefined, iter};
            if (trace) trace->result = refined;
            return refined;
        }
        cmd = center_est;
    }

    if (trace) trace->error = "non-convergent";
    throw NonConvergent("offset still above " + std::to_string(config.threshold_mm()) +
                        " mm after " + std::to_string(config.max_iters) + " iterations near (" +
                        std::to_string(cmd.x) + ", " + std::to_string(cmd.y) + ")");
}

std::vector<CandidateLocation> merge_candidates(const std::vector<CandidateLocation>& refined,
                                                double merge_threshold_mm) {
    const std::size_t n = refined.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (distance(refined[i].xy_mm, refined[j].xy_mm) < merge_threshold_mm)
                parent[find(i)] = find(j);

    // Representative: last member of each cluster in input order; clusters
    // emitted in order of their first member.
    std::vector<CandidateLocation> merged;
    std::vector<bool> emitted(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t root = find(i);
        if (emitted[root]) continue;
        emitted[root] = true;
        std::size_t last = i;
        for (std::size_t j = i; j < n; ++j)
            if (find(j) == root) last = j;
        merged.push_back(refined[last]);
    }
    return merged;
}

double localization_error(const Vec2& estimate_mm, const Vec2& truth_mm) {
    return distance(estimate_mm, truth_mm);
}

} // namespace tactile
