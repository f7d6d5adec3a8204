#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cobandit/env.hpp"

// Per-agent learning state and arm selection for CO-UCB / CO-AAE and the
// non-cooperative IND-UCB / IND-AAE baselines.

namespace cobandit {

// Raised when a trial reaches a state the algorithms exclude by contract
// (e.g. an emptied candidate set). Carries a diagnostic state dump.
struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

struct DeltaSchedule {
    enum class Kind { InverseRound, Constant };
    Kind kind = Kind::InverseRound;
    double constant = 0.0;

    static DeltaSchedule inverse_round() { return {Kind::InverseRound, 0.0}; }
    static DeltaSchedule fixed(double delta);

    double at(Round t) const {
        return kind == Kind::InverseRound ? 1.0 / static_cast<double>(t) : constant;
    }
};

// Half-width sqrt(alpha * ln(1/delta) / (2*count)) of the confidence
// interval for a mean estimated from `count` observations.
double confidence_width(std::int64_t count, double alpha, double delta);

// Observation counts and empirical means over one agent's local arms.
// Counts include observations received from other agents.
class EstimatorState {
public:
    EstimatorState(std::int32_t num_arms, std::vector<Arm> local_set, double alpha,
                   DeltaSchedule schedule);

    // n(arm) += 1, mean(arm) updated incrementally. Throws if arm not local.
    void observe(Arm arm, int reward);

    // Snapshot restore: overwrite one arm's statistics wholesale.
    void set_statistics(Arm arm, std::int64_t count, double mean);

    std::int64_t count(Arm arm) const { return counts_[static_cast<std::size_t>(arm)]; }
    double mean(Arm arm) const { return means_[static_cast<std::size_t>(arm)]; }
    bool is_local(Arm arm) const;

    double width(Arm arm, Round t) const {
        return confidence_width(count(arm), alpha_, schedule_.at(t));
    }
    double upper(Arm arm, Round t) const { return mean(arm) + width(arm, t); }
    double lower(Arm arm, Round t) const { return mean(arm) - width(arm, t); }

    const std::vector<Arm>& local_set() const { return local_set_; }
    double alpha() const { return alpha_; }
    const DeltaSchedule& schedule() const { return schedule_; }

private:
    std::vector<Arm> local_set_; // sorted
    double alpha_;
    DeltaSchedule schedule_;
    std::vector<std::int64_t> counts_; // dense over global arm ids
    std::vector<double> means_;
};

// UCB selection: any local arm with n=0 forces exploration (lowest index
// first); otherwise argmax of mean + width at delta_t, ties to lowest index.
Arm select_ucb(const EstimatorState& state, Round t);

// An agent's surviving local arms plus its (lagged) view of every other
// agent's surviving set, maintained from elimination notices.
class CandidateSet {
public:
    CandidateSet() = default;
    // Own candidates start as the full local set; each peer view starts as
    // that peer's full local set.
    CandidateSet(const Instance& instance, Agent owner);

    const std::vector<Arm>& own() const { return own_; }
    bool own_contains(Arm arm) const;
    std::size_t own_size() const { return own_.size(); }

    const std::vector<Arm>& peer(Agent other) const {
        return peer_view_[static_cast<std::size_t>(other)];
    }
    bool peer_contains(Agent other, Arm arm) const;
    std::size_t peer_size(Agent other) const {
        return peer_view_[static_cast<std::size_t>(other)].size();
    }

    void remove_own(Arm arm);
    void remove_peer(Agent other, const std::vector<Arm>& arms);

    Agent owner() const { return owner_; }

private:
    Agent owner_ = 0;
    std::vector<Arm> own_;                   // sorted
    std::vector<std::vector<Arm>> peer_view_; // indexed by agent id; own slot empty
};

// Permanently removes every candidate whose confidence interval lies
// strictly below some local arm's interval; arms with n=0 are exempt on both
// sides. Returns the newly eliminated arms (sorted) for broadcast.
std::vector<Arm> refresh_candidates(const EstimatorState& state, CandidateSet& cands,
                                    Round t);

// Least-observed candidate, ties to lowest index. Throws InvariantViolation
// on an empty candidate set.
Arm select_aae(const CandidateSet& cands, const EstimatorState& state);

// True when some local arm's true mean lies outside the agent's current
// confidence interval (a Type-II state in the harness's bookkeeping).
// Unexplored arms never violate.
bool confidence_violated(const EstimatorState& state, const std::vector<double>& true_means,
                         Round t);

// Text snapshot (counts, means, candidates) for trace dumps and diagnostics.
std::string snapshot_text(const EstimatorState& state, const CandidateSet* cands);

} // namespace cobandit
