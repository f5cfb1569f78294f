#include "tactile/pipelines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "tactile/errors.hpp"
#include "tactile/frame_io.hpp"
#include "tactile/regions.hpp"

namespace tactile::harness {

using nlohmann::json;

namespace {

json vec2_json(const Vec2& v) { return json::array({v.x, v.y}); }

constexpr double kInclusionCenterZ = -6.0;

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ArtifactError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArtifactError("cannot open " + path.string() + " for writing");
    out << text;
}

// Wall-clock timings live in a sidecar so report.json stays byte-identical
// across reruns of the same seed.
class PhaseTimer {
public:
    PhaseTimer(std::string phase, fs::path out_dir)
        : phase_(std::move(phase)), out_dir_(std::move(out_dir)), start_(std::chrono::steady_clock::now()) {}
    ~PhaseTimer() {
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json j;
        j["phase"] = phase_;
        j["seconds"] = s;
        std::ofstream out(out_dir_ / "timings.json");
        if (out) out << j.dump(2) << "\n";
    }

private:
    std::string phase_;
    fs::path out_dir_;
    std::chrono::steady_clock::time_point start_;
};

ObsNormalizer make_normalizer(const ExperimentConfig& cfg) {
    ObsNormalizer n;
    n.z_lo_mm = cfg.env.z_min_mm;
    n.z_hi_mm = cfg.env.z_max_mm;
    return n;
}

// Persist one acquired sequence as PGM frames plus the CSV sidecar; returns
// the relative frames directory.
std::string persist_sequence(const FrameSequence& seq, const fs::path& out_dir,
                             const std::string& rel_dir) {
    fs::path dir = out_dir / rel_dir;
    ensure_dir(dir);
    std::vector<FrameRecord> rows;
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        const auto& f = seq.frames[i];
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04zu.pgm", i);
        write_pgm(dir / name, f);
        rows.push_back({f.frame_index, f.applied_force_n, f.probe_pose_mm, f.pixel_sum()});
    }
    write_sequence_csv(dir / "frames.csv", rows);
    return rel_dir;
}

json sequence_json(const FrameSequence& seq) {
    json j;
    j["frame_count"] = seq.frames.size();
    j["forces_n"] = seq.forces();
    j["pixel_sums"] = seq.pixel_sums();
    return j;
}

// Characterize one acquired sequence; fills size/di/risk fields.
void characterize_into(json& row, const FrameSequence& seq, const CalibrationSurface& surface,
                       const RiskWeights& weights) {
    SizeEstimate size = estimate_size(seq, surface);
    DeformationIndex di = estimate_di(seq);
    row["size_mm"] = size.diameter_mm;
    row["size_positive"] = size.positive;
    row["per_frame_size_mm"] = size.per_frame_mm;
    row["di_counts_per_n"] = di.di;
    row["di_residual_rms"] = di.residual_rms;
    row["di_points"] = di.point_count;
    row["risk_score"] = risk_score(size.diameter_mm, di.di, weights);
}

} // namespace

PhantomSpec single_inclusion_phantom(const ExperimentConfig& cfg, double diameter_mm,
                                     double elasticity_kpa, double layer_depth_mm) {
    PhantomSpec ph;
    ph.extent_mm = cfg.phantom.extent_mm;
    ph.surface_z_mm = cfg.phantom.surface_z_mm;
    ph.inclusion_layer_depth_mm = layer_depth_mm;
    ph.background_stiffness_kpa = cfg.phantom.background_stiffness_kpa;
    ph.inclusions = {{{0.5 * ph.extent_mm.x, 0.5 * ph.extent_mm.y, kInclusionCenterZ},
                      diameter_mm, elasticity_kpa}};
    return ph;
}

double resolve_detection_threshold(const ExperimentConfig& cfg) {
    if (cfg.binarize_threshold >= 0.0) return cfg.binarize_threshold;
    PhantomSpec empty;
    empty.extent_mm = cfg.phantom.extent_mm;
    empty.surface_z_mm = cfg.phantom.surface_z_mm;
    empty.inclusion_layer_depth_mm = cfg.phantom.inclusion_layer_depth_mm;
    empty.background_stiffness_kpa = cfg.phantom.background_stiffness_kpa;
    TactileSimulator sim(empty, cfg.make_sensor(derive_seed(cfg.seed, "background")));
    TactileFrame frame = sim.press_and_capture({0.5 * empty.extent_mm.x, 0.5 * empty.extent_mm.y},
                                               cfg.coarse_press_force_n);
    return background_threshold(frame);
}

CalibrateOutput run_calibrate(const ExperimentConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    ensure_dir(out_dir);
    PhaseTimer timer("calibrate", out_dir);

    double distinct = 0;
    for (std::size_t i = 0; i < cfg.calibration_pieces.size(); ++i) {
        bool unique = true;
        for (std::size_t k = 0; k < i; ++k)
            if (cfg.calibration_pieces[k].diameter_mm == cfg.calibration_pieces[i].diameter_mm)
                unique = false;
        if (unique) distinct += 1;
    }
    if (distinct < 2)
        throw RankDeficient("calibration needs >= 2 distinct inclusion sizes for intensity span");

    CalibrateOutput out;
    for (std::size_t i = 0; i < cfg.calibration_pieces.size(); ++i) {
        const auto& piece = cfg.calibration_pieces[i];
        PhantomSpec ph = single_inclusion_phantom(cfg, piece.diameter_mm, piece.elasticity_kpa,
                                                  cfg.calibration_layer_depth_mm);
        TactileSimulator sim(ph, cfg.make_sensor(derive_seed(cfg.seed, "calibrate", i)));
        Vec2 center = ph.inclusions.front().center_roi.xy();
        FrameSequence seq = scripted_sequence(sim, center, cfg.calibration_forces_n, cfg.window);
        for (const auto& frame : seq.frames)
            out.samples.push_back({frame.applied_force_n, frame.pixel_sum(), piece.diameter_mm});
    }

    out.surface = fit_size_surface(out.samples);

    // Persist surface with provenance.
    json j;
    j["schema_version"] = 1;
    j["type"] = "size_surface";
    j["scaled_coefficients"] = out.surface.scaled_coefficients();
    j["force_mean"] = out.surface.force_mean();
    j["force_scale"] = out.surface.force_scale();
    j["intensity_mean"] = out.surface.intensity_mean();
    j["intensity_scale"] = out.surface.intensity_scale();
    auto raw = out.surface.raw_coefficients();
    j["raw_coefficients"] = {{raw[0][0], raw[0][1]}, {raw[1][0], raw[1][1]}, {raw[2][0], raw[2][1]}};
    json prov;
    prov["config_digest"] = cfg.digest();
    prov["pieces"] = json::array();
    for (const auto& p : cfg.calibration_pieces)
        prov["pieces"].push_back({{"diameter_mm", p.diameter_mm}, {"elasticity_kpa", p.elasticity_kpa}});
    prov["layer_depth_mm"] = cfg.calibration_layer_depth_mm;
    prov["target_forces_n"] = cfg.calibration_forces_n;
    prov["sample_count"] = out.samples.size();
    j["provenance"] = prov;
    out.surface_path = out_dir / "surface.json";
    write_text(out.surface_path, j.dump(2) + "\n");

    std::ofstream csv(out_dir / "samples.csv");
    csv << "force_N,pixel_sum,true_diameter_mm\n";
    for (const auto& s : out.samples)
        csv << format_num(s.force_n) << ',' << format_num(s.pixel_sum) << ','
            << format_num(s.true_diameter_mm) << '\n';
    return out;
}

TrainOutput run_train(const ExperimentConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    ensure_dir(out_dir);
    PhaseTimer timer("train", out_dir);

    PhantomSpec ph = single_inclusion_phantom(cfg, cfg.training_diameter_mm,
                                              cfg.training_elasticity_kpa,
                                              cfg.training_layer_depth_mm);
    TactileSimulator sim(ph, cfg.make_sensor(derive_seed(cfg.seed, "train-sim")));

    PressEnvConfig env_cfg = cfg.env;
    env_cfg.press_xy = ph.inclusions.front().center_roi.xy();
    env_cfg.window_lo_n = cfg.window.window_lo_n;
    env_cfg.window_hi_n = cfg.window.window_hi_n;
    PressEnv env(sim, env_cfg, derive_seed(cfg.seed, "env-reset"));

    SacAgent agent(3, cfg.agent, derive_seed(cfg.seed, "agent"));
    TrainOutput out;
    out.trace = agent.train(env, cfg.training_episodes);

    out.checkpoint_path = out_dir / "model.ckpt";
    agent.save(out.checkpoint_path);

    out.trace_path = out_dir / "trace.csv";
    std::ofstream csv(out.trace_path);
    csv << "episode,steps,cumulative_reward\n";
    for (const auto& e : out.trace)
        csv << e.episode << ',' << e.steps << ',' << format_num(e.cumulative_reward) << '\n';
    return out;
}

InterrogateOutput run_interrogate(const ExperimentConfig& cfg, const fs::path& model_path,
                                  const fs::path& surface_path, const fs::path& out_dir) {
    cfg.validate();
    ensure_dir(out_dir);
    PhaseTimer timer("interrogate", out_dir);

    SacAgent agent = SacAgent::load(model_path);
    CalibrationSurface surface = CalibrationSurface::load(surface_path);
    ObsNormalizer normalizer = make_normalizer(cfg);

    double threshold = resolve_detection_threshold(cfg);
    DetectConfig detect = cfg.make_detect(threshold);

    TactileSimulator sim(cfg.phantom, cfg.make_sensor(derive_seed(cfg.seed, "interrogate")));

    json report;
    report["schema_version"] = 1;
    report["kind"] = "interrogation_report";
    report["config_digest"] = cfg.digest();
    report["seed"] = cfg.seed;
    report["profile"] = cfg.profile;
    report["detection_threshold"] = threshold;
    report["min_region_diameter_px"] = detect.min_diameter_px;

    // --- coarse scan
    GridPlan plan = plan_grid(cfg.roi, cfg.grid_dx_mm, cfg.grid_dy_mm);
    report["grid"] = {{"dx_mm", plan.dx_mm}, {"dy_mm", plan.dy_mm},
                      {"waypoint_count", plan.waypoints.size()}};
    CoarseResult coarse = coarse_interrogate(sim, plan, cfg.coarse_press_force_n, detect,
                                             cfg.window.travel_z_mm);
    {
        json visits = json::array();
        for (const auto& v : coarse.visits)
            visits.push_back({{"xy_mm", vec2_json(v.waypoint_mm)},
                              {"region_count", v.region_count},
                              {"largest_diameter_px", v.largest_diameter_px},
                              {"pixel_sum", v.pixel_sum},
                              {"flagged", v.flagged}});
        json cands = json::array();
        for (const auto& c : coarse.candidates) cands.push_back(vec2_json(c.xy_mm));
        report["coarse"] = {{"visits", visits}, {"candidates", cands}};
    }

    // --- refinement
    bool candidate_errors = false;
    std::vector<CandidateLocation> refined;
    json traces = json::array();
    for (const auto& candidate : coarse.candidates) {
        RefineTrace trace;
        json tj;
        tj["candidate_xy_mm"] = vec2_json(candidate.xy_mm);
        try {
            CandidateLocation r = refine_location(sim, candidate, cfg.fine, detect, &trace);
            refined.push_back(r);
            tj["result_xy_mm"] = vec2_json(r.xy_mm);
            tj["iterations_used"] = r.iterations;
        } catch (const LostTarget& e) {
            candidate_errors = true;
            tj["error"] = std::string("lost_target: ") + e.what();
        } catch (const NonConvergent& e) {
            candidate_errors = true;
            tj["error"] = std::string("non_convergent: ") + e.what();
        }
        json iters = json::array();
        for (const auto& it : trace.iterations)
            iters.push_back({{"iteration", it.iteration},
                             {"commanded_xy_mm", vec2_json(it.commanded_xy_mm)},
                             {"offset_px", it.offset_px},
                             {"offset_mm", it.offset_mm},
                             {"region_found", it.region_found}});
        tj["iterations"] = iters;
        traces.push_back(tj);
    }

    std::vector<CandidateLocation> merged = merge_candidates(refined, cfg.merge_threshold_mm);
    {
        json fj;
        fj["traces"] = traces;
        json rj = json::array();
        for (const auto& r : refined) rj.push_back(vec2_json(r.xy_mm));
        fj["refined"] = rj;
        json mj = json::array();
        for (const auto& m : merged)
            mj.push_back({{"xy_mm", vec2_json(m.xy_mm)}, {"iterations", m.iterations}});
        fj["merged"] = mj;
        fj["merge_threshold_mm"] = cfg.merge_threshold_mm;
        report["fine"] = fj;
    }

    // --- per-inclusion acquisition + property estimation
    json characterization = json::array();
    for (std::size_t k = 0; k < merged.size(); ++k) {
        json row;
        row["target_index"] = k;
        row["xy_mm"] = vec2_json(merged[k].xy_mm);
        try {
            FrameSequence seq = acquire_sequence(sim, agent, normalizer, merged[k].xy_mm, cfg.window);
            row["sequence"] = sequence_json(seq);
            characterize_into(row, seq, surface, cfg.risk);
            if (cfg.persist_frames != "none") {
                char rel[48];
                std::snprintf(rel, sizeof(rel), "frames/inclusion_%zu", k);
                row["frames_dir"] = persist_sequence(seq, out_dir, rel);
            }
        } catch (const Error& e) {
            candidate_errors = true;
            row["error"] = e.what();
        }
        characterization.push_back(row);
    }
    report["characterization"] = characterization;

    // --- localization vs ground truth
    json localization = json::array();
    for (const auto& truth : cfg.phantom.inclusions) {
        json lj;
        lj["true_center_mm"] = vec2_json(truth.center_roi.xy());
        lj["true_diameter_mm"] = truth.diameter_mm;
        lj["true_elasticity_kpa"] = truth.elasticity_kpa;
        if (!merged.empty()) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < merged.size(); ++k) {
                double d = localization_error(merged[k].xy_mm, truth.center_roi.xy());
                if (d < best_d) {
                    best_d = d;
                    best = k;
                }
            }
            lj["matched_index"] = best;
            lj["estimate_mm"] = vec2_json(merged[best].xy_mm);
            lj["error_mm"] = best_d;
        }
        localization.push_back(lj);
    }
    report["localization"] = localization;
    report["candidate_errors"] = candidate_errors;

    InterrogateOutput out;
    out.report = report;
    out.candidate_errors = candidate_errors;
    out.report_path = out_dir / "report.json";
    write_text(out.report_path, report.dump(2) + "\n");
    return out;
}

InterrogateOutput run_characterize(const ExperimentConfig& cfg, const fs::path& model_path,
                                   const fs::path& surface_path, const fs::path& out_dir) {
    cfg.validate();
    ensure_dir(out_dir);
    PhaseTimer timer("characterize", out_dir);

    SacAgent agent = SacAgent::load(model_path);
    CalibrationSurface surface = CalibrationSurface::load(surface_path);
    ObsNormalizer normalizer = make_normalizer(cfg);

    json report;
    report["schema_version"] = 1;
    report["kind"] = "characterization_report";
    report["config_digest"] = cfg.digest();
    report["seed"] = cfg.seed;
    report["profile"] = cfg.profile;

    bool errors = false;
    json rows = json::array();
    for (std::size_t k = 0; k < cfg.characterize_targets.size(); ++k) {
        const auto& target = cfg.characterize_targets[k];
        PhantomSpec ph = single_inclusion_phantom(cfg, target.diameter_mm, target.elasticity_kpa,
                                                  target.layer_depth_mm);
        TactileSimulator sim(ph, cfg.make_sensor(derive_seed(cfg.seed, "characterize", k)));
        Vec2 center = ph.inclusions.front().center_roi.xy();

        json row;
        row["target_index"] = k;
        row["true_diameter_mm"] = target.diameter_mm;
        row["true_elasticity_kpa"] = target.elasticity_kpa;
        row["layer_depth_mm"] = target.layer_depth_mm;
        row["xy_mm"] = vec2_json(center);
        try {
            FrameSequence seq = acquire_sequence(sim, agent, normalizer, center, cfg.window);
            row["sequence"] = sequence_json(seq);
            characterize_into(row, seq, surface, cfg.risk);
            row["size_error_percent"] =
                size_error_percent(target.diameter_mm, row["size_mm"].get<double>());
            if (cfg.persist_frames != "none") {
                char rel[48];
                std::snprintf(rel, sizeof(rel), "frames/target_%zu", k);
                row["frames_dir"] = persist_sequence(seq, out_dir, rel);
            }
        } catch (const Error& e) {
            errors = true;
            row["error"] = e.what();
        }
        rows.push_back(row);
    }
    report["characterization"] = rows;
    report["candidate_errors"] = errors;

    InterrogateOutput out;
    out.report = report;
    out.candidate_errors = errors;
    out.report_path = out_dir / "report.json";
    write_text(out.report_path, report.dump(2) + "\n");
    return out;
}

nlohmann::json load_report(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ArtifactError("cannot open report " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ArtifactError(path.string() + ": " + e.what());
    }
    if (!j.contains("characterization"))
        throw ArtifactError(path.string() + ": missing characterization section");
    return j;
}

namespace {

struct TableRow {
    std::string target;
    std::string true_size;
    std::string est_size;
    std::string size_error;
    std::string di;
    std::string risk;
};

std::vector<TableRow> collect_rows(const json& report) {
    std::vector<TableRow> rows;
    // Truth lookup from the localization section when present.
    for (const auto& row : report.at("characterization")) {
        TableRow r;
        r.target = std::to_string(row.at("target_index").get<int>());
        if (row.contains("error")) {
            r.true_size = r.est_size = r.size_error = r.di = r.risk = "error";
            rows.push_back(r);
            continue;
        }
        double est = row.at("size_mm").get<double>();
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", est);
        r.est_size = buf;

        double truth = -1.0;
        if (row.contains("true_diameter_mm")) {
            truth = row.at("true_diameter_mm").get<double>();
        } else if (report.contains("localization")) {
            for (const auto& l : report.at("localization"))
                if (l.contains("matched_index") &&
                    l.at("matched_index").get<int>() == row.at("target_index").get<int>())
                    truth = l.at("true_diameter_mm").get<double>();
        }
        if (truth > 0.0) {
            std::snprintf(buf, sizeof(buf), "%.1f", truth);
            r.true_size = buf;
            std::snprintf(buf, sizeof(buf), "%.2f%%", size_error_percent(truth, est));
            r.size_error = buf;
        } else {
            r.true_size = "n/a";
            r.size_error = "n/a";
        }
        std::snprintf(buf, sizeof(buf), "%.2f", row.at("di_counts_per_n").get<double>() / 1000.0);
        r.di = buf;
        std::snprintf(buf, sizeof(buf), "%.3f", row.at("risk_score").get<double>());
        r.risk = buf;
        rows.push_back(r);
    }
    return rows;
}

} // namespace

std::string render_report_table(const json& report) {
    auto rows = collect_rows(report);
    const char* headers[6] = {"Target", "True Size (mm)", "Estimated Size (mm)",
                              "Size Error (%)", "DI (10^3)", "Risk Score"};
    std::size_t width[6];
    for (int c = 0; c < 6; ++c) width[c] = std::string(headers[c]).size();
    for (const auto& r : rows) {
        const std::string* cells[6] = {&r.target, &r.true_size, &r.est_size,
                                       &r.size_error, &r.di, &r.risk};
        for (int c = 0; c < 6; ++c) width[c] = std::max(width[c], cells[c]->size());
    }
    std::string out;
    auto append_row = [&](const std::string cells[6]) {
        for (int c = 0; c < 6; ++c) {
            out += cells[c];
            out.append(width[c] - cells[c].size() + 2, ' ');
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    };
    std::string hdr[6];
    for (int c = 0; c < 6; ++c) hdr[c] = headers[c];
    append_row(hdr);
    for (const auto& r : rows) {
        std::string cells[6] = {r.target, r.true_size, r.est_size, r.size_error, r.di, r.risk};
        append_row(cells);
    }
    out += "note: manual-operator comparison columns are not reproducible in simulation\n";
    return out;
}

std::string render_report_csv(const json& report) {
    auto rows = collect_rows(report);
    std::string out = "target,true_size_mm,estimated_size_mm,size_error_percent,di_1e3,risk_score\n";
    for (const auto& r : rows) {
        std::string err = r.size_error;
        if (!err.empty() && err.back() == '%') err.pop_back();
        out += r.target + ',' + r.true_size + ',' + r.est_size + ',' + err + ',' + r.di + ',' +
               r.risk + '\n';
    }
    return out;
}

} // namespace tactile::harness
