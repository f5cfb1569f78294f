#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "tactile/errors.hpp"
#include "tactile/frame_io.hpp"
#include "tactile/pipelines.hpp"

using namespace tactile;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

ExperimentConfig small_config(std::uint64_t seed = 1) {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    cfg.seed = seed;
    cfg.phantom.extent_mm = {80.0, 80.0};
    cfg.phantom.inclusions = {{{40.0, 40.0, -6.0}, 15.3, 94.4}};
    cfg.roi.extent_mm = cfg.phantom.extent_mm;
    cfg.roi.start_mm = {20.0, 20.0, 25.0};
    cfg.grid_dx_mm = 20.0;
    cfg.grid_dy_mm = 20.0;
    cfg.calibration_pieces = {{14.0, 6.2}, {18.9, 628.0}};
    cfg.calibration_forces_n = {2, 4, 6, 8};
    cfg.training_episodes = 3;
    return cfg;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("config json round-trip preserves the digest") {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.digest() == cfg.digest());
    CHECK(back.phantom.inclusions.size() == 2);
    CHECK(back.phantom.inclusions[0].center_roi.x == doctest::Approx(44.50));

    ExperimentConfig other = ExperimentConfig::defaults();
    other.seed = 999;
    CHECK(other.digest() != cfg.digest());
}

TEST_CASE("config errors are typed") {
    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/config.json"), ConfigError);

    nlohmann::json j = ExperimentConfig::defaults().to_json();
    j["schema_version"] = 99;
    CHECK_THROWS_AS(ExperimentConfig::from_json(j), ConfigError);

    ExperimentConfig bad = ExperimentConfig::defaults();
    bad.profile = "huge";
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    bad = ExperimentConfig::defaults();
    bad.merge_threshold_mm = -2.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("calibrate: deterministic artifact, rank failure on one piece") {
    TempDir dir("tactile_cal_test");
    ExperimentConfig cfg = small_config(7);

    auto out1 = harness::run_calibrate(cfg, dir.path / "a");
    auto out2 = harness::run_calibrate(cfg, dir.path / "b");
    CHECK(slurp(out1.surface_path) == slurp(out2.surface_path));
    CHECK(out1.samples.size() == cfg.calibration_pieces.size() * cfg.calibration_forces_n.size());

    CalibrationSurface loaded = CalibrationSurface::load(out1.surface_path);
    CHECK(std::isfinite(loaded.evaluate(5.0, 1.0e5)));

    ExperimentConfig single = cfg;
    single.calibration_pieces = {{15.3, 94.4}};
    CHECK_THROWS_AS(harness::run_calibrate(single, dir.path / "c"), RankDeficient);
}

TEST_CASE("train: zero episodes writes an untrained checkpoint and empty trace") {
    TempDir dir("tactile_train0_test");
    ExperimentConfig cfg = small_config(5);
    cfg.training_episodes = 0;
    auto out = harness::run_train(cfg, dir.path);
    CHECK(fs::exists(out.checkpoint_path));
    CHECK(out.trace.empty());

    SacAgent agent = SacAgent::load(out.checkpoint_path);
    EnvObservation o;
    o.normalized = {0.0, 0.0, 0.3};
    auto p = agent.policy_distribution(o);
    CHECK(p[0] == doctest::Approx(0.5));

    std::string trace = slurp(out.trace_path);
    CHECK(trace == "episode,steps,cumulative_reward\n");
}

TEST_CASE("train: identical seeds write identical trace csvs") {
    TempDir dir("tactile_train_det_test");
    ExperimentConfig cfg = small_config(11);
    auto out1 = harness::run_train(cfg, dir.path / "a");
    auto out2 = harness::run_train(cfg, dir.path / "b");
    CHECK(slurp(out1.trace_path) == slurp(out2.trace_path));
    CHECK(slurp(out1.checkpoint_path) == slurp(out2.checkpoint_path));
}

TEST_CASE("characterize with an untrained model records NoContact per target, keeps going") {
    TempDir dir("tactile_char_err_test");
    ExperimentConfig cfg = small_config(3);
    cfg.training_episodes = 0;
    cfg.characterize_targets = {{15.3, 94.4, 6.0}};
    auto train = harness::run_train(cfg, dir.path / "train");
    auto cal = harness::run_calibrate(cfg, dir.path / "cal");

    auto out = harness::run_characterize(cfg, train.checkpoint_path, cal.surface_path,
                                         dir.path / "char");
    CHECK(out.candidate_errors);
    REQUIRE(out.report.contains("characterization"));
    const auto& row = out.report["characterization"][0];
    CHECK(row.contains("error"));
    CHECK(fs::exists(out.report_path));
}

TEST_CASE("report rendering: table shape and csv consistency") {
    nlohmann::json report;
    report["kind"] = "characterization_report";
    report["characterization"] = nlohmann::json::array();
    nlohmann::json row;
    row["target_index"] = 0;
    row["true_diameter_mm"] = 15.3;
    row["size_mm"] = 15.7;
    row["di_counts_per_n"] = 5350.0;
    row["risk_score"] = 0.385;
    report["characterization"].push_back(row);

    std::string table = harness::render_report_table(report);
    CHECK(table.find("Target") != std::string::npos);
    CHECK(table.find("True Size (mm)") != std::string::npos);
    CHECK(table.find("Estimated Size (mm)") != std::string::npos);
    CHECK(table.find("Size Error (%)") != std::string::npos);
    CHECK(table.find("DI (10^3)") != std::string::npos);
    CHECK(table.find("Risk Score") != std::string::npos);
    CHECK(table.find("2.61%") != std::string::npos);
    CHECK(table.find("5.35") != std::string::npos);
    CHECK(table.find("not reproducible") != std::string::npos);

    // CSV error column equals the recomputed value at 2 decimals.
    std::string csv = harness::render_report_csv(report);
    CHECK(csv.find("0,15.3,15.7,2.61,5.35,0.385") != std::string::npos);
}

TEST_CASE("fuzzed configs complete or fail with typed errors") {
    // Ranges documented in the README: extents 40-120 mm, spacing 5-40 mm,
    // forces 0.5-12 N, up to 3 inclusions of 6-25 mm and 20-900 kPa, noise
    // up to the documented bounds; a slice of draws is deliberately invalid.
    Rng rng(2024);
    int completed = 0, rejected = 0;
    for (int trial = 0; trial < 100; ++trial) {
        ExperimentConfig cfg = ExperimentConfig::defaults();
        cfg.seed = 3000 + trial;
        double ex = rng.uniform(40.0, 120.0), ey = rng.uniform(40.0, 120.0);
        cfg.phantom.extent_mm = {ex, ey};
        cfg.roi.extent_mm = cfg.phantom.extent_mm;
        cfg.phantom.inclusions.clear();
        int n_inc = static_cast<int>(rng.below(4));
        for (int i = 0; i < n_inc; ++i)
            cfg.phantom.inclusions.push_back({{rng.uniform(0.0, ex), rng.uniform(0.0, ey),
                                               -rng.uniform(3.0, 9.0)},
                                              rng.uniform(6.0, 25.0),
                                              rng.uniform(20.0, 900.0)});
        cfg.roi.start_mm = {rng.uniform(-5.0, ex), rng.uniform(1.0, ey - 1.0), 25.0};
        cfg.grid_dx_mm = rng.uniform(5.0, 40.0);
        cfg.grid_dy_mm = rng.uniform(5.0, 40.0);
        cfg.coarse_press_force_n = rng.uniform(0.5, 12.0);
        cfg.sensor.pos_noise_bound_mm = rng.uniform(0.0, 5.0);
        cfg.sensor.intensity_noise_sd = rng.uniform(0.0, 2.0);
        if (trial % 7 == 0) cfg.merge_threshold_mm = -1.0;         // invalid on purpose
        if (trial % 11 == 0) cfg.window.window_hi_n = 0.5;         // invalid window

        try {
            cfg.validate();
            GridPlan plan = plan_grid(cfg.roi, cfg.grid_dx_mm, cfg.grid_dy_mm);
            TactileSimulator sim(cfg.phantom, cfg.make_sensor(cfg.seed));
            TactileFrame frame = sim.press_and_capture(plan.waypoints.front(),
                                                       cfg.coarse_press_force_n);
            detect_regions(frame, cfg.min_region_diameter_px(), 3.0);
            ++completed;
        } catch (const Error&) {
            ++rejected;   // typed failure is an acceptable outcome
        }
    }
    CHECK(completed + rejected == 100);
    CHECK(completed > 30);
    CHECK(rejected > 5);
}

TEST_CASE("persisted frames match their sidecar pixel sums") {
    TempDir dir("tactile_frames_test");
    SensorConfig cfg = SensorConfig::reduced_profile();
    cfg.intensity_noise_sd = 1.0;
    cfg.rng_seed = 17;
    PhantomSpec ph;
    ph.extent_mm = {80.0, 80.0};
    ph.inclusion_layer_depth_mm = 6.0;
    ph.inclusions = {{{40.0, 40.0, -6.0}, 15.3, 94.4}};
    TactileSimulator sim(ph, cfg);

    std::vector<FrameRecord> rows;
    for (int i = 0; i < 3; ++i) {
        sim.move_to({40.0, 40.0, -2.0 - i});
        TactileFrame frame = sim.render_frame();
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04d.pgm", i);
        write_pgm(dir.path / name, frame);
        rows.push_back({frame.frame_index, frame.applied_force_n, frame.probe_pose_mm,
                        frame.pixel_sum()});
    }
    write_sequence_csv(dir.path / "frames.csv", rows);

    auto back = read_sequence_csv(dir.path / "frames.csv");
    for (int i = 0; i < 3; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "frame_%04d.pgm", i);
        TactileFrame loaded = read_pgm(dir.path / name);
        CHECK(loaded.pixel_sum() == back[i].pixel_sum);
    }
}
