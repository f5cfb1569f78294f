#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tactile/errors.hpp"
#include "tactile/pipelines.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitTargetLost = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "runs";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> profile;
};

tactile::ExperimentConfig load_config(const CommonOpts& opts) {
    tactile::ExperimentConfig cfg = opts.config_path.empty()
                                        ? tactile::ExperimentConfig::defaults()
                                        : tactile::ExperimentConfig::load(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.profile) cfg.profile = *opts.profile;
    cfg.validate();
    return cfg;
}

// Phase artifacts are immutable: the first run of a phase owns
// <out>/<phase>; reruns get a timestamped sibling.
std::filesystem::path resolve_phase_dir(const std::string& out_root, const std::string& phase) {
    namespace fs = std::filesystem;
    fs::path base = fs::path(out_root) / phase;
    if (!fs::exists(base)) return base;
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "-%Y%m%d-%H%M%S", std::localtime(&now));
    fs::path candidate = fs::path(out_root) / (phase + stamp);
    for (int n = 1; fs::exists(candidate); ++n)
        candidate = fs::path(out_root) / (phase + stamp + "-" + std::to_string(n));
    return candidate;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config JSON (defaults built in)");
    cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--profile", opts.profile, "sensor profile: full | reduced")
        ->check(CLI::IsMember({"full", "reduced"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tactile inclusion localization and characterization toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string model_path = "runs/train/model.ckpt";
    std::string surface_path = "runs/calibrate/surface.json";
    std::string report_path;
    std::string csv_out;

    auto* calibrate = app.add_subcommand("calibrate", "fit the size surface from sweep data");
    add_common(calibrate, opts);

    auto* train = app.add_subcommand("train", "train the press policy, write checkpoint + trace");
    add_common(train, opts);

    auto* interrogate =
        app.add_subcommand("interrogate", "coarse/fine interrogation plus characterization");
    add_common(interrogate, opts);
    interrogate->add_option("--model", model_path, "trained model checkpoint")->capture_default_str();
    interrogate->add_option("--surface", surface_path, "calibration surface JSON")
        ->capture_default_str();

    auto* characterize =
        app.add_subcommand("characterize", "size/DI/risk for configured held-out targets");
    add_common(characterize, opts);
    characterize->add_option("--model", model_path, "trained model checkpoint")->capture_default_str();
    characterize->add_option("--surface", surface_path, "calibration surface JSON")
        ->capture_default_str();

    auto* report = app.add_subcommand("report", "render a persisted report as a table");
    report->add_option("report", report_path, "path to report.json")->required();
    report->add_option("--csv", csv_out, "also write the table as CSV to this path");

    auto* dump = app.add_subcommand("dump-config", "print the effective config as JSON");
    add_common(dump, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (calibrate->parsed()) {
            auto cfg = load_config(opts);
            auto out = tactile::harness::run_calibrate(cfg, resolve_phase_dir(opts.out_dir, "calibrate"));
            std::cout << "surface: " << out.surface_path.string() << " (" << out.samples.size()
                      << " samples)\n";
            return kExitOk;
        }
        if (train->parsed()) {
            auto cfg = load_config(opts);
            auto out = tactile::harness::run_train(cfg, resolve_phase_dir(opts.out_dir, "train"));
            std::cout << "checkpoint: " << out.checkpoint_path.string() << "\n"
                      << "trace: " << out.trace_path.string() << " (" << out.trace.size()
                      << " episodes)\n";
            return kExitOk;
        }
        if (interrogate->parsed()) {
            auto cfg = load_config(opts);
            auto out = tactile::harness::run_interrogate(cfg, model_path, surface_path, resolve_phase_dir(opts.out_dir, "interrogate"));
            std::cout << "report: " << out.report_path.string() << "\n";
            std::cout << tactile::harness::render_report_table(out.report);
            return out.candidate_errors ? kExitTargetLost : kExitOk;
        }
        if (characterize->parsed()) {
            auto cfg = load_config(opts);
            auto out = tactile::harness::run_characterize(cfg, model_path, surface_path, resolve_phase_dir(opts.out_dir, "characterize"));
            std::cout << "report: " << out.report_path.string() << "\n";
            std::cout << tactile::harness::render_report_table(out.report);
            return out.candidate_errors ? kExitTargetLost : kExitOk;
        }
        if (report->parsed()) {
            auto j = tactile::harness::load_report(report_path);
            std::cout << tactile::harness::render_report_table(j);
            if (!csv_out.empty()) {
                std::ofstream out(csv_out);
                if (!out) throw tactile::ArtifactError("cannot open " + csv_out);
                out << tactile::harness::render_report_csv(j);
            }
            return kExitOk;
        }
        if (dump->parsed()) {
            auto cfg = load_config(opts);
            std::cout << cfg.to_json().dump(2) << "\n";
            return kExitOk;
        }
    } catch (const tactile::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const tactile::NonFiniteLoss& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const tactile::RankDeficient& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const tactile::LostTarget& e) {
        std::cerr << "target lost: " << e.what() << "\n";
        return kExitTargetLost;
    } catch (const tactile::NonConvergent& e) {
        std::cerr << "non-convergent: " << e.what() << "\n";
        return kExitTargetLost;
    } catch (const tactile::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
