#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cobandit/analysis.hpp"
#include "cobandit/env.hpp"
#include "cobandit/sim.hpp"

// Experiment orchestration: config ingestion, seeded multi-trial execution,
// aggregation and file emission. Trials are independent units; the parallel
// runner farms them out with OpenMP while aggregation always walks trials in
// index order, so thread count never changes any emitted byte. The serial
// runner is the reference implementation the parallel one is tested against.

namespace cobandit {

struct ExperimentConfig {
    std::optional<std::string> instance_file;
    std::optional<GenerationSpec> gen; // exactly one source must be set

    Round horizon = 30000;
    std::int64_t trials = 10;
    std::uint64_t base_seed = 1;
    double alpha = 2.5;
    DeltaSchedule schedule = DeltaSchedule::inverse_round();
    std::vector<Algorithm> algorithms;
    std::int64_t stride = 100;
    bool message_log = false; // keep per-trial logs; meant for small runs
    int threads = 0;          // parallel runner hint; 0 = runtime default

    // Resolved runs carry explicit per-trial seeds; empty means "derive
    // from base_seed".
    std::vector<std::uint64_t> trial_seeds;

    std::uint64_t seed_for_trial(std::int64_t trial) const;
    void validate() const; // throws std::runtime_error on config errors
};

ExperimentConfig config_from_text(const std::string& text, const std::string& origin);
ExperimentConfig load_config(const std::string& path);
// resolved=true appends the derived trial seeds for replay.
std::string config_to_text(const ExperimentConfig& config, bool resolved);

// The base instance shared by all trials (delay matrix may still vary per
// trial under the per-trial-uniform rule).
Instance build_instance(const ExperimentConfig& config);

// Instance actually used by one trial.
Instance trial_instance(const ExperimentConfig& config, const Instance& base,
                        std::int64_t trial);

struct TrialRun {
    std::int64_t trial = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<Algorithm, TrialTrace>> traces; // config order
};

TrialRun run_trial(const ExperimentConfig& config, const Instance& base,
                   std::int64_t trial, const SimOptions* base_opts = nullptr);

struct AlgoSummary {
    Algorithm algo = Algorithm::CoUcb;
    std::vector<Round> rounds;
    std::vector<double> regret_mean;
    std::vector<double> regret_std;
    std::vector<double> comm_mean;
    std::vector<double> comm_std;
    double final_regret_mean = 0.0;
    double final_regret_std = 0.0;
    double final_comm_mean = 0.0;
    double per_agent_regret_mean = 0.0;
    double final_pseudo_mean = 0.0;
    std::vector<double> trial_final_regret;
    std::vector<double> trial_final_pseudo;
    std::vector<std::int64_t> trial_final_comm;
    std::vector<std::vector<double>> trial_agent_regret; // per trial, per agent
    std::int64_t trials_with_violation = 0;
    std::vector<std::string> trial_message_logs; // rendered; only if requested
};

struct BoundsSummary {
    double lower = 0.0; // NaN when a boundary mean makes KL undefined
    double coucb_regret = 0.0;
    double coaae_regret = 0.0;
    double coucb_comm = 0.0;
    double coaae_comm = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config; // resolved
    Instance instance;       // base
    std::vector<AlgoSummary> algorithms;
    BoundsSummary bounds; // averaged over trials
};

ExperimentResult run_experiment(const ExperimentConfig& config);        // OpenMP
ExperimentResult run_experiment_serial(const ExperimentConfig& config); // reference

// Writes <algo>.csv per algorithm, summary.txt, config_resolved.txt,
// instance.txt and optional per-trial message logs into `directory`.
void emit_results(const ExperimentResult& result, const std::string& directory);

// Reread an emitted directory's resolved config + instance for replay.
ExperimentConfig load_replay_config(const std::string& directory);

// Experiment presets; returns (subdirectory label, config) pairs.
std::vector<std::pair<std::string, ExperimentConfig>> preset_configs(const std::string& name);

std::string csv_text(const AlgoSummary& summary);
std::string summary_text(const ExperimentResult& result);

} // namespace cobandit
