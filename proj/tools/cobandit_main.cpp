#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cobandit/analysis.hpp"
#include "cobandit/harness.hpp"
#include "cobandit/textio.hpp"

namespace {

using namespace cobandit;

struct Overrides {
    std::int64_t seed = -1;
    std::int64_t trials = -1;
    std::int64_t horizon = -1;
    int threads = -1;
    std::vector<std::string> algos;
};

void apply(const Overrides& ov, ExperimentConfig& cfg) {
    if (ov.seed >= 0) {
        cfg.base_seed = static_cast<std::uint64_t>(ov.seed);
        cfg.trial_seeds.clear();
    }
    if (ov.trials >= 0) {
        cfg.trials = ov.trials;
        cfg.trial_seeds.clear();
    }
    if (ov.horizon >= 0) cfg.horizon = ov.horizon;
    if (ov.threads >= 0) cfg.threads = ov.threads;
    if (!ov.algos.empty()) {
        cfg.algorithms.clear();
        for (const auto& name : ov.algos) {
            auto algo = algorithm_from_name(name);
            if (!algo) throw std::runtime_error("unknown algorithm '" + name + "'");
            cfg.algorithms.push_back(*algo);
        }
    }
    cfg.validate();
}

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--seed", ov.seed, "base seed override");
    cmd->add_option("--trials", ov.trials, "trial count override");
    cmd->add_option("--horizon", ov.horizon, "horizon override");
    cmd->add_option("--threads", ov.threads, "trial-level worker threads (0 = default)");
    cmd->add_option("--algos", ov.algos,
                    "algorithm subset (co_ucb co_aae ind_ucb ind_aae)");
}

void print_run_summary(const ExperimentResult& result, const std::string& out_dir) {
    std::cout << summary_text(result);
    std::cout << "written " << out_dir << "\n";
}

bool compare_file(const std::string& a, const std::string& b, bool& all_equal) {
    std::string ta = read_text_file(a);
    std::string tb = read_text_file(b);
    bool eq = ta == tb;
    if (!eq) all_equal = false;
    std::cout << (eq ? "identical " : "DIFFERS   ") << a << "\n";
    return eq;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cooperative multi-agent bandit simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "results", preset_name, replay_dir, replay_out;
    bool serial = false;
    Overrides ov;

    auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
    run_cmd->add_option("--config", config_path, "config file path")->required();
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_flag("--serial", serial, "use the serial reference runner");
    add_override_flags(run_cmd, ov);

    auto* preset_cmd = app.add_subcommand("preset", "run a built-in experiment grid");
    preset_cmd->add_option("name", preset_name, "exp1 | exp2 | exp3")->required();
    preset_cmd->add_option("--out", out_dir, "output directory");
    preset_cmd->add_flag("--serial", serial, "use the serial reference runner");
    add_override_flags(preset_cmd, ov);

    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate the closed-form bounds only");
    bounds_cmd->add_option("--config", config_path, "config file path")->required();

    auto* replay_cmd = app.add_subcommand("replay", "re-run an emitted result directory");
    replay_cmd->add_option("--dir", replay_dir, "emitted result directory")->required();
    replay_cmd->add_option("--out", replay_out,
                           "write the replay here instead of comparing in place");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run_cmd) {
            ExperimentConfig cfg = load_config(config_path);
            apply(ov, cfg);
            ExperimentResult result =
                serial ? run_experiment_serial(cfg) : run_experiment(cfg);
            emit_results(result, out_dir);
            print_run_summary(result, out_dir);
        } else if (*preset_cmd) {
            for (auto& [label, cfg] : preset_configs(preset_name)) {
                apply(ov, cfg);
                std::cout << "== " << preset_name << " " << label << " ==\n";
                ExperimentResult result =
                    serial ? run_experiment_serial(cfg) : run_experiment(cfg);
                std::string dir = out_dir + "/" + label;
                emit_results(result, dir);
                print_run_summary(result, dir);
            }
        } else if (*bounds_cmd) {
            ExperimentConfig cfg = load_config(config_path);
            Instance inst = build_instance(cfg);
            GapProfile profile = compute_gaps(inst);
            std::cout << bound_report_text(profile, inst.horizon, cfg.alpha,
                                           inbound_delays(inst));
        } else if (*replay_cmd) {
            ExperimentConfig cfg = load_replay_config(replay_dir);
            ExperimentResult result = run_experiment(cfg);
            if (!replay_out.empty()) {
                emit_results(result, replay_out);
                print_run_summary(result, replay_out);
            } else {
                std::string tmp = replay_dir + "/.replay_check";
                emit_results(result, tmp);
                bool all_equal = true;
                for (auto algo : cfg.algorithms) {
                    std::string name = std::string(algorithm_name(algo)) + ".csv";
                    compare_file(replay_dir + "/" + name, tmp + "/" + name, all_equal);
                }
                compare_file(replay_dir + "/summary.txt", tmp + "/summary.txt", all_equal);
                compare_file(replay_dir + "/instance.txt", tmp + "/instance.txt", all_equal);
                std::filesystem::remove_all(tmp);
                if (!all_equal) {
                    std::cerr << "replay mismatch\n";
                    return 2;
                }
                std::cout << "replay reproduces the emitted files exactly\n";
            }
        }
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
