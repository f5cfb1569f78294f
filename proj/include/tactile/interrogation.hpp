#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tactile/grid_plan.hpp"
#include "tactile/regions.hpp"
#include "tactile/simulator.hpp"

namespace tactile {

struct CandidateLocation {
    enum class Source { kCoarse, kRefined };
    Vec2 xy_mm;
    Source source = Source::kCoarse;
    int iterations = 0;   // refinement iterations, coarse candidates carry 0
};

struct DetectConfig {
    double min_diameter_px = 25.0;
    double binarize_threshold = 3.0;
};

struct WaypointResult {
    Vec2 waypoint_mm;
    int region_count = 0;
    double largest_diameter_px = 0.0;
    double pixel_sum = 0.0;
    bool flagged = false;
};

struct CoarseResult {
    std::vector<WaypointResult> visits;
    std::vector<CandidateLocation> candidates;
};

// Visit every waypoint, press to press_force, capture one frame, flag the
// waypoint as a candidate when region detection finds anything. The probe
// retracts fully between waypoints.
CoarseResult coarse_interrogate(TactileSimulator& sim, const GridPlan& plan,
                                double press_force_n, const DetectConfig& detect,
                                double travel_z_mm = 25.0);

struct FiConfig {
    double constant_force_n = 5.0;
    // The stop threshold is specified in pixels of the reference camera
    // (threshold_ref_mm_per_px), i.e. 70 px = 2.1 mm, and applied as that
    // physical distance so reduced-resolution profiles behave identically.
    double offset_threshold_px = 70.0;
    double threshold_ref_mm_per_px = 0.03;
    int max_iters = 40;
    double travel_z_mm = 25.0;

    double threshold_mm() const { return offset_threshold_px * threshold_ref_mm_per_px; }
};

struct RefineIteration {
    int iteration = 0;
    Vec2 commanded_xy_mm;
    double offset_px = 0.0;
    double offset_mm = 0.0;
    bool region_found = false;
};

struct RefineTrace {
    std::vector<RefineIteration> iterations;
    std::optional<CandidateLocation> result;
    std::string error;   // empty on success
};

// Iteratively recenter the probe on the centroid of the largest detected
// region until the pixel offset from the image center falls below the
// threshold. The recenter command is issued relative to the pose the robot
// reports for the captured frame. Throws LostTarget / NonConvergent; the
// trace out-param is filled either way.
CandidateLocation refine_location(TactileSimulator& sim, const CandidateLocation& candidate,
                                  const FiConfig& config, const DetectConfig& detect,
                                  RefineTrace* trace = nullptr);

// Single-linkage clustering on XY distance; one representative per cluster,
// the last member in input order. Output preserves cluster discovery order.
std::vector<CandidateLocation> merge_candidates(const std::vector<CandidateLocation>& refined,
                                                double merge_threshold_mm = 6.0);

// Euclidean XY distance between an estimate and the true center.
double localization_error(const Vec2& estimate_mm, const Vec2& truth_mm);

} // namespace tactile
