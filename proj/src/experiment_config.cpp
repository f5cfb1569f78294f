#include "tactile/experiment_config.hpp"

#include <fstream>

#include "tactile/errors.hpp"

namespace tactile {

using nlohmann::json;

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig cfg;
    cfg.seed = 1;
    cfg.profile = "reduced";

    cfg.phantom.extent_mm = {165.1, 215.9};
    cfg.phantom.inclusion_layer_depth_mm = 12.0;
    cfg.phantom.background_stiffness_kpa = 30.0;
    cfg.phantom.inclusions = {
        {{44.50, 51.50, -6.0}, 18.9, 628.0},
        {{40.00, 118.50, -6.0}, 15.3, 94.4},
    };

    cfg.sensor.force_noise_sd_n = 0.05;
    cfg.sensor.intensity_noise_sd = 1.0;
    cfg.sensor.pos_noise_bound_mm = 5.0;

    cfg.roi.extent_mm = cfg.phantom.extent_mm;
    cfg.roi.transform.origin_base = {0.6762, -0.1431, 0.1729};
    cfg.roi.start_mm = {38.25, 38.25, 25.0};

    cfg.calibration_pieces = {{14.0, 6.2}, {15.3, 94.4}, {18.9, 628.0}, {22.0, 962.0}};
    cfg.calibration_layer_depth_mm = 6.0;
    cfg.calibration_forces_n = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    cfg.characterize_targets = {
        {15.3, 94.4, 6.0},
        {18.9, 628.0, 6.0},
    };
    return cfg;
}

SensorConfig ExperimentConfig::make_sensor(std::uint64_t stream_seed) const {
    SensorConfig out = sensor;
    SensorConfig base =
        profile == "full" ? SensorConfig::full_profile() : SensorConfig::reduced_profile();
    out.image_width = base.image_width;
    out.image_height = base.image_height;
    out.mm_per_pixel = base.mm_per_pixel;
    out.rng_seed = stream_seed;
    return out;
}

double ExperimentConfig::min_region_diameter_px() const {
    SensorConfig s = profile == "full" ? SensorConfig::full_profile() : SensorConfig::reduced_profile();
    return min_region_diameter_mm / s.mm_per_pixel;
}

DetectConfig ExperimentConfig::make_detect(double threshold) const {
    return DetectConfig{min_region_diameter_px(), threshold};
}

void ExperimentConfig::validate() const {
    if (profile != "full" && profile != "reduced")
        throw ConfigError("profile must be 'full' or 'reduced'");
    phantom.validate();
    make_sensor(seed).validate();
    roi.validate();
    if (grid_dx_mm <= 0.0 || grid_dy_mm <= 0.0) throw ConfigError("grid spacing must be positive");
    if (coarse_press_force_n <= 0.0) throw ConfigError("coarse press force must be positive");
    if (min_region_diameter_mm <= 0.0) throw ConfigError("min region diameter must be positive");
    if (fine.constant_force_n <= 0.0 || fine.offset_threshold_px <= 0.0 ||
        fine.threshold_ref_mm_per_px <= 0.0 || fine.max_iters <= 0)
        throw ConfigError("fine interrogation thresholds must be positive");
    if (merge_threshold_mm <= 0.0) throw ConfigError("merge threshold must be positive");
    if (window.window_lo_n < 0.0 || window.window_hi_n <= window.window_lo_n)
        throw ConfigError("force window must satisfy 0 <= lo < hi");
    if (training_episodes < 0) throw ConfigError("training episodes must be >= 0");
    if (training_diameter_mm <= 0.0 || training_elasticity_kpa <= 0.0)
        throw ConfigError("training inclusion must have positive size and elasticity");
    risk.validate();
    if (persist_frames != "all" && persist_frames != "characterization" && persist_frames != "none")
        throw ConfigError("persist_frames must be all | characterization | none");
    for (const auto& p : calibration_pieces)
        if (p.diameter_mm <= 0.0 || p.elasticity_kpa <= 0.0)
            throw ConfigError("calibration pieces need positive size and elasticity");
    for (const auto& t : characterize_targets)
        if (t.diameter_mm <= 0.0 || t.elasticity_kpa <= 0.0)
            throw ConfigError("characterize targets need positive size and elasticity");
}

namespace {

json vec2_json(const Vec2& v) { return json::array({v.x, v.y}); }
json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec2 vec2_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
Vec3 vec3_from(const json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

} // namespace

json ExperimentConfig::to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["seed"] = seed;
    j["profile"] = profile;

    json ph;
    ph["extent_mm"] = vec2_json(phantom.extent_mm);
    ph["surface_z_mm"] = phantom.surface_z_mm;
    ph["inclusion_layer_depth_mm"] = phantom.inclusion_layer_depth_mm;
    ph["background_stiffness_kpa"] = phantom.background_stiffness_kpa;
    ph["inclusions"] = json::array();
    for (const auto& inc : phantom.inclusions)
        ph["inclusions"].push_back({{"center_mm", vec3_json(inc.center_roi)},
                                    {"diameter_mm", inc.diameter_mm},
                                    {"elasticity_kpa", inc.elasticity_kpa}});
    j["phantom"] = ph;

    json sn;
    sn["force_noise_sd_n"] = sensor.force_noise_sd_n;
    sn["intensity_noise_sd"] = sensor.intensity_noise_sd;
    sn["pos_noise_bound_mm"] = sensor.pos_noise_bound_mm;
    sn["max_force_n"] = sensor.max_force_n;
    sn["spring_base_n_per_mm"] = sensor.spring_base_n_per_mm;
    sn["stiffness_gain"] = sensor.stiffness_gain;
    sn["probe_radius_mm"] = sensor.probe_radius_mm;
    sn["intensity_gain"] = sensor.intensity_gain;
    sn["sigma_per_diameter"] = sensor.sigma_per_diameter;
    sn["depth_decay_mm"] = sensor.depth_decay_mm;
    sn["elasticity_ref_kpa"] = sensor.elasticity_ref_kpa;
    sn["elasticity_exponent"] = sensor.elasticity_exponent;
    j["sensor"] = sn;

    j["roi"] = {{"origin_base_m", vec3_json(roi.transform.origin_base)},
                {"start_mm", vec3_json(roi.start_mm)}};
    j["grid"] = {{"dx_mm", grid_dx_mm}, {"dy_mm", grid_dy_mm}};
    j["coarse"] = {{"press_force_n", coarse_press_force_n}};
    j["detection"] = {{"min_region_diameter_mm", min_region_diameter_mm},
                      {"binarize_threshold", binarize_threshold}};
    j["fine"] = {{"constant_force_n", fine.constant_force_n},
                 {"offset_threshold_px", fine.offset_threshold_px},
                 {"threshold_ref_mm_per_px", fine.threshold_ref_mm_per_px},
                 {"max_iters", fine.max_iters},
                 {"merge_threshold_mm", merge_threshold_mm}};
    j["force_window"] = {{"lo_n", window.window_lo_n},
                         {"hi_n", window.window_hi_n},
                         {"step_mm", window.step_mm},
                         {"travel_z_mm", window.travel_z_mm},
                         {"max_steps", window.max_steps}};

    json ag;
    ag["hidden"] = agent.hidden;
    ag["gamma"] = agent.gamma;
    ag["tau"] = agent.tau;
    ag["actor_lr"] = agent.actor_lr;
    ag["critic_lr"] = agent.critic_lr;
    ag["alpha_lr"] = agent.alpha_lr;
    ag["batch_size"] = agent.batch_size;
    ag["buffer_capacity"] = agent.buffer_capacity;
    ag["target_entropy"] = agent.target_entropy;
    ag["initial_alpha"] = agent.initial_alpha;
    ag["warmup_transitions"] = agent.warmup_transitions;
    ag["updates_per_step"] = agent.updates_per_step;
    ag["episodes"] = training_episodes;
    ag["training_diameter_mm"] = training_diameter_mm;
    ag["training_elasticity_kpa"] = training_elasticity_kpa;
    ag["training_layer_depth_mm"] = training_layer_depth_mm;
    ag["z_start_mm"] = env.z_start_mm;
    ag["z_start_jitter_mm"] = env.z_start_jitter_mm;
    ag["step_mm"] = env.step_mm;
    ag["max_steps"] = env.max_steps;
    ag["plateau_steps"] = env.plateau_steps;
    j["agent"] = ag;

    json cal;
    cal["pieces"] = json::array();
    for (const auto& p : calibration_pieces)
        cal["pieces"].push_back({{"diameter_mm", p.diameter_mm}, {"elasticity_kpa", p.elasticity_kpa}});
    cal["layer_depth_mm"] = calibration_layer_depth_mm;
    cal["target_forces_n"] = calibration_forces_n;
    cal["use_trained_model"] = calibration_uses_model;
    j["calibration"] = cal;

    j["risk"] = {{"w_size", risk.w_size},
                 {"w_di", risk.w_di},
                 {"d_max_mm", risk.d_max_mm},
                 {"di_max", risk.di_max}};

    j["characterize"] = json::array();
    for (const auto& t : characterize_targets)
        j["characterize"].push_back({{"diameter_mm", t.diameter_mm},
                                     {"elasticity_kpa", t.elasticity_kpa},
                                     {"layer_depth_mm", t.layer_depth_mm}});

    j["persist_frames"] = persist_frames;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig cfg = defaults();
    try {
        if (j.value("schema_version", kSchemaVersion) != kSchemaVersion)
            throw ConfigError("unsupported schema_version");
        cfg.seed = j.value("seed", cfg.seed);
        cfg.profile = j.value("profile", cfg.profile);

        if (j.contains("phantom")) {
            const json& ph = j["phantom"];
            if (ph.contains("extent_mm")) cfg.phantom.extent_mm = vec2_from(ph["extent_mm"]);
            cfg.phantom.surface_z_mm = ph.value("surface_z_mm", cfg.phantom.surface_z_mm);
            cfg.phantom.inclusion_layer_depth_mm =
                ph.value("inclusion_layer_depth_mm", cfg.phantom.inclusion_layer_depth_mm);
            cfg.phantom.background_stiffness_kpa =
                ph.value("background_stiffness_kpa", cfg.phantom.background_stiffness_kpa);
            if (ph.contains("inclusions")) {
                cfg.phantom.inclusions.clear();
                for (const auto& ij : ph["inclusions"])
                    cfg.phantom.inclusions.push_back({vec3_from(ij.at("center_mm")),
                                                      ij.at("diameter_mm").get<double>(),
                                                      ij.at("elasticity_kpa").get<double>()});
            }
            cfg.roi.extent_mm = cfg.phantom.extent_mm;
        }

        if (j.contains("sensor")) {
            const json& sn = j["sensor"];
            cfg.sensor.force_noise_sd_n = sn.value("force_noise_sd_n", cfg.sensor.force_noise_sd_n);
            cfg.sensor.intensity_noise_sd = sn.value("intensity_noise_sd", cfg.sensor.intensity_noise_sd);
            cfg.sensor.pos_noise_bound_mm = sn.value("pos_noise_bound_mm", cfg.sensor.pos_noise_bound_mm);
            cfg.sensor.max_force_n = sn.value("max_force_n", cfg.sensor.max_force_n);
            cfg.sensor.spring_base_n_per_mm =
                sn.value("spring_base_n_per_mm", cfg.sensor.spring_base_n_per_mm);
            cfg.sensor.stiffness_gain = sn.value("stiffness_gain", cfg.sensor.stiffness_gain);
            cfg.sensor.probe_radius_mm = sn.value("probe_radius_mm", cfg.sensor.probe_radius_mm);
            cfg.sensor.intensity_gain = sn.value("intensity_gain", cfg.sensor.intensity_gain);
            cfg.sensor.sigma_per_diameter = sn.value("sigma_per_diameter", cfg.sensor.sigma_per_diameter);
            cfg.sensor.depth_decay_mm = sn.value("depth_decay_mm", cfg.sensor.depth_decay_mm);
            cfg.sensor.elasticity_ref_kpa = sn.value("elasticity_ref_kpa", cfg.sensor.elasticity_ref_kpa);
            cfg.sensor.elasticity_exponent =
                sn.value("elasticity_exponent", cfg.sensor.elasticity_exponent);
        }

        if (j.contains("roi")) {
            const json& r = j["roi"];
            if (r.contains("origin_base_m"))
                cfg.roi.transform.origin_base = vec3_from(r["origin_base_m"]);
            if (r.contains("start_mm")) cfg.roi.start_mm = vec3_from(r["start_mm"]);
        }
        if (j.contains("grid")) {
            cfg.grid_dx_mm = j["grid"].value("dx_mm", cfg.grid_dx_mm);
            cfg.grid_dy_mm = j["grid"].value("dy_mm", cfg.grid_dy_mm);
        }
        if (j.contains("coarse"))
            cfg.coarse_press_force_n = j["coarse"].value("press_force_n", cfg.coarse_press_force_n);
        if (j.contains("detection")) {
            cfg.min_region_diameter_mm =
                j["detection"].value("min_region_diameter_mm", cfg.min_region_diameter_mm);
            cfg.binarize_threshold = j["detection"].value("binarize_threshold", cfg.binarize_threshold);
        }
        if (j.contains("fine")) {
            const json& f = j["fine"];
            cfg.fine.constant_force_n = f.value("constant_force_n", cfg.fine.constant_force_n);
            cfg.fine.offset_threshold_px = f.value("offset_threshold_px", cfg.fine.offset_threshold_px);
            cfg.fine.threshold_ref_mm_per_px =
                f.value("threshold_ref_mm_per_px", cfg.fine.threshold_ref_mm_per_px);
            cfg.fine.max_iters = f.value("max_iters", cfg.fine.max_iters);
            cfg.merge_threshold_mm = f.value("merge_threshold_mm", cfg.merge_threshold_mm);
        }
        if (j.contains("force_window")) {
            const json& w = j["force_window"];
            cfg.window.window_lo_n = w.value("lo_n", cfg.window.window_lo_n);
            cfg.window.window_hi_n = w.value("hi_n", cfg.window.window_hi_n);
            cfg.window.step_mm = w.value("step_mm", cfg.window.step_mm);
            cfg.window.travel_z_mm = w.value("travel_z_mm", cfg.window.travel_z_mm);
            cfg.window.max_steps = w.value("max_steps", cfg.window.max_steps);
        }
        if (j.contains("agent")) {
            const json& a = j["agent"];
            if (a.contains("hidden")) cfg.agent.hidden = a["hidden"].get<std::vector<int>>();
            cfg.agent.gamma = a.value("gamma", cfg.agent.gamma);
            cfg.agent.tau = a.value("tau", cfg.agent.tau);
            cfg.agent.actor_lr = a.value("actor_lr", cfg.agent.actor_lr);
            cfg.agent.critic_lr = a.value("critic_lr", cfg.agent.critic_lr);
            cfg.agent.alpha_lr = a.value("alpha_lr", cfg.agent.alpha_lr);
            cfg.agent.batch_size = a.value("batch_size", cfg.agent.batch_size);
            cfg.agent.buffer_capacity = a.value("buffer_capacity", cfg.agent.buffer_capacity);
            cfg.agent.target_entropy = a.value("target_entropy", cfg.agent.target_entropy);
            cfg.agent.initial_alpha = a.value("initial_alpha", cfg.agent.initial_alpha);
            cfg.agent.warmup_transitions = a.value("warmup_transitions", cfg.agent.warmup_transitions);
            cfg.agent.updates_per_step = a.value("updates_per_step", cfg.agent.updates_per_step);
            cfg.training_episodes = a.value("episodes", cfg.training_episodes);
            cfg.training_diameter_mm = a.value("training_diameter_mm", cfg.training_diameter_mm);
            cfg.training_elasticity_kpa =
                a.value("training_elasticity_kpa", cfg.training_elasticity_kpa);
            cfg.training_layer_depth_mm =
                a.value("training_layer_depth_mm", cfg.training_layer_depth_mm);
            cfg.env.z_start_mm = a.value("z_start_mm", cfg.env.z_start_mm);
            cfg.env.z_start_jitter_mm = a.value("z_start_jitter_mm", cfg.env.z_start_jitter_mm);
            cfg.env.step_mm = a.value("step_mm", cfg.env.step_mm);
            cfg.env.max_steps = a.value("max_steps", cfg.env.max_steps);
            cfg.env.plateau_steps = a.value("plateau_steps", cfg.env.plateau_steps);
        }
        if (j.contains("calibration")) {
            const json& c = j["calibration"];
            if (c.contains("pieces")) {
                cfg.calibration_pieces.clear();
                for (const auto& pj : c["pieces"])
                    cfg.calibration_pieces.push_back(
                        {pj.at("diameter_mm").get<double>(), pj.at("elasticity_kpa").get<double>()});
            }
            cfg.calibration_layer_depth_mm = c.value("layer_depth_mm", cfg.calibration_layer_depth_mm);
            if (c.contains("target_forces_n"))
                cfg.calibration_forces_n = c["target_forces_n"].get<std::vector<double>>();
            cfg.calibration_uses_model = c.value("use_trained_model", cfg.calibration_uses_model);
        }
        if (j.contains("risk")) {
            const json& r = j["risk"];
            cfg.risk.w_size = r.value("w_size", cfg.risk.w_size);
            cfg.risk.w_di = r.value("w_di", cfg.risk.w_di);
            cfg.risk.d_max_mm = r.value("d_max_mm", cfg.risk.d_max_mm);
            cfg.risk.di_max = r.value("di_max", cfg.risk.di_max);
        }
        if (j.contains("characterize")) {
            cfg.characterize_targets.clear();
            for (const auto& t : j["characterize"])
                cfg.characterize_targets.push_back({t.at("diameter_mm").get<double>(),
                                                    t.at("elasticity_kpa").get<double>(),
                                                    t.value("layer_depth_mm", 6.0)});
        }
        cfg.persist_frames = j.value("persist_frames", cfg.persist_frames);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

void ExperimentConfig::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw ArtifactError("cannot open " + path.string() + " for writing");
    out << to_json().dump(2) << "\n";
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return from_json(j);
}

std::string ExperimentConfig::digest() const {
    std::string canonical = to_json().dump();
    std::uint64_t h = 1469598103934665603ull;
    for (char c : canonical) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace tactile
