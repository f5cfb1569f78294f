#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tactile/experiment_config.hpp"
#include "tactile/size_surface.hpp"

namespace tactile::harness {

namespace fs = std::filesystem;

// Single-inclusion specimen centered in the configured extent; used for
// calibration sweeps, training, and held-out characterization targets.
PhantomSpec single_inclusion_phantom(const ExperimentConfig& cfg, double diameter_mm,
                                     double elasticity_kpa, double layer_depth_mm);

// Background detection threshold: a press over an empty phantom, the frame's
// mean + 3 sigma. Used when the config keeps the threshold on auto.
double resolve_detection_threshold(const ExperimentConfig& cfg);

struct CalibrateOutput {
    CalibrationSurface surface;
    std::vector<CalibrationSample> samples;
    fs::path surface_path;
};

// Sweep every calibration piece over the force targets, fit the size
// surface, persist surface + samples. Throws RankDeficient when the piece
// set cannot span the fit (fewer than two distinct sizes).
CalibrateOutput run_calibrate(const ExperimentConfig& cfg, const fs::path& out_dir);

struct TrainOutput {
    fs::path checkpoint_path;
    fs::path trace_path;
    std::vector<EpisodeResult> trace;
};

TrainOutput run_train(const ExperimentConfig& cfg, const fs::path& out_dir);

struct InterrogateOutput {
    nlohmann::json report;
    fs::path report_path;
    bool candidate_errors = false;   // LostTarget/NonConvergent recorded
};

// Full pipeline: coarse scan, refinement, merging, per-inclusion acquisition
// and property estimation. Individual candidate failures are recorded in the
// report without aborting the run.
InterrogateOutput run_interrogate(const ExperimentConfig& cfg, const fs::path& model_path,
                                  const fs::path& surface_path, const fs::path& out_dir);

// Held-out targets on single-inclusion phantoms: acquire with the trained
// policy and estimate size/DI/risk per target.
InterrogateOutput run_characterize(const ExperimentConfig& cfg, const fs::path& model_path,
                                   const fs::path& surface_path, const fs::path& out_dir);

// Aligned text table / CSV for a persisted report.
std::string render_report_table(const nlohmann::json& report);
std::string render_report_csv(const nlohmann::json& report);
nlohmann::json load_report(const fs::path& path);

} // namespace tactile::harness
