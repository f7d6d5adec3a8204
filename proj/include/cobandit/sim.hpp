#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "cobandit/analysis.hpp"
#include "cobandit/env.hpp"
#include "cobandit/network.hpp"
#include "cobandit/policies.hpp"

// Single-trial executor. Each round processes agents in index order:
// deliveries first, then the scheduled decision, then outbound broadcasts.
// Everything is a deterministic function of (instance, algorithm, seed).

namespace cobandit {

enum class Algorithm { CoUcb, CoAae, IndUcb, IndAae };

const char* algorithm_name(Algorithm algo);
std::optional<Algorithm> algorithm_from_name(const std::string& name);
bool is_cooperative(Algorithm algo);
bool uses_elimination(Algorithm algo);

// Test hook: state of the deciding agent just before the pull is applied.
struct DecisionAudit {
    Agent agent = 0;
    Round round = 0;
    Arm chosen = 0;
    std::int64_t nhat_before = 0;
    const EstimatorState* state = nullptr;
    const CandidateSet* cands = nullptr; // null for UCB runs
};

struct SimOptions {
    std::int64_t stride = 100;
    bool keep_pull_log = true;
    bool keep_message_log = false;
    bool check_confidence = true; // per-decision truth-coverage bookkeeping
    double alpha = 2.5;
    DeltaSchedule schedule = DeltaSchedule::inverse_round();
    std::function<void(const DecisionAudit&)> on_decision;
};

TrialTrace simulate(const Instance& instance, Algorithm algo, std::uint64_t trial_seed,
                    const SimOptions& opts = {});

} // namespace cobandit
