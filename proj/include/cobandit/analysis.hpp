#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cobandit/env.hpp"
#include "cobandit/network.hpp"
#include "cobandit/policies.hpp"

// Instance-level gap structure, evaluators for the closed-form regret and
// communication bounds, and regret extraction from recorded trial traces.
// All evaluators are pure functions over immutable inputs.

namespace cobandit {

// Kullback-Leibler divergence between Bernoulli(u) and Bernoulli(v).
// Throws std::domain_error when u or v touches {0,1}.
double kl_bernoulli(double u, double v);

struct GapProfile {
    std::vector<double> means;
    std::vector<std::vector<double>> pair_gap; // pair_gap[a][b] = mu(a) - mu(b)
    std::vector<double> global_gap;            // mu(global best) - mu(i)
    std::vector<double> tilde_gap;             // min over suboptimal holders, else 0
    std::vector<std::vector<Agent>> holders;         // agents whose local set has i
    std::vector<std::vector<Agent>> optimal_for;     // holders with i locally optimal
    std::vector<std::vector<Agent>> suboptimal_for;  // holders \ optimal_for
    std::vector<Arm> local_best;               // lowest-index local optimum per agent
    std::vector<double> theta;                 // action rate per agent
    double theta_total = 0.0;
    std::vector<double> theta_arm;             // aggregate rate over holders of i

    std::int32_t num_arms() const { return static_cast<std::int32_t>(means.size()); }
    std::int32_t num_agents() const { return static_cast<std::int32_t>(theta.size()); }
};

GapProfile compute_gaps(const Instance& instance);

// Worst inbound staleness per agent: max over senders j' of delay(j', j).
std::vector<std::int64_t> inbound_delays(const Instance& instance);

// ln(T) * sum over gap arms of tilde_gap / KL(mu, mu + tilde_gap).
// Requires mu in (0,1) and mu + tilde_gap < 1 for every gap arm.
double lower_bound(const GapProfile& profile, Round horizon);

// sum over gap arms of (6*alpha*lnT / tilde_gap + f_i(1/T) + 1) + q2, with
// f_i(d) = sum over holders of min{d_j*theta_j, 2*alpha*lnT / gap^2} and the
// delay term alone where the holder's gap is zero.
double coucb_regret_bound(const GapProfile& profile, Round horizon, double alpha,
                          const std::vector<std::int64_t>& delays);

// Same shape with leading constant 24*alpha and an 8*alpha inner numerator.
double coaae_regret_bound(const GapProfile& profile, Round horizon, double alpha,
                          const std::vector<std::int64_t>& delays);

struct CommBounds {
    double coucb = 0.0; // M * Theta * T
    double coaae = 0.0;
};

CommBounds comm_bounds(const GapProfile& profile, Round horizon, double alpha,
                       const std::vector<std::int64_t>& delays);

double q2_term(const GapProfile& profile, double alpha);

// Raw residual-probability mass for an explicit delta schedule:
// 2 * sum_j sum_{l=1..N_j} sum_{i in K_j} (l * Theta_i / theta_j) * delta^alpha.
double q1_raw(const Instance& instance, const DeltaSchedule& schedule, double alpha);

// Per-arm term breakdown of every bound, for audit.
std::string bound_report_text(const GapProfile& profile, Round horizon, double alpha,
                              const std::vector<std::int64_t>& delays);

// ---------------------------------------------------------------------------
// Trial traces

struct PullRecord {
    Round round = 0;
    Arm arm = 0;
    int reward = 0;
    std::int64_t nhat_before = 0; // observation count used by the decision
    bool covered = true;          // all local intervals covered truth at decision
};

struct SeriesPoint {
    Round round = 0;
    double regret_realized = 0.0; // aggregate over agents
    double regret_pseudo = 0.0;
    std::int64_t messages = 0;    // cumulative C_t
};

struct TrialTrace {
    std::int32_t num_arms = 0;
    std::int32_t num_agents = 0;
    Round horizon = 0;
    std::int64_t stride = 0;

    std::vector<std::vector<PullRecord>> pulls;          // per agent, round order
    std::vector<std::vector<std::int64_t>> local_pulls;  // per agent, per arm, at T
    std::vector<SeriesPoint> series;

    std::vector<double> agent_realized; // final per-agent regret
    std::vector<double> agent_pseudo;

    bool confidence_violation = false;
    std::int64_t messages_sent = 0;
    std::int64_t observations_sent = 0;
    std::int64_t eliminations_sent = 0;
    std::int64_t messages_delivered = 0;
    std::int64_t messages_in_flight = 0;

    std::vector<std::vector<Arm>> final_candidates; // per agent; empty for UCB runs
    std::vector<Message> message_log;               // populated only when requested
};

struct RegretSeries {
    std::vector<Round> rounds;
    std::vector<double> realized; // aggregate
    std::vector<double> pseudo;
    std::vector<double> agent_realized_final;
    std::vector<double> agent_pseudo_final;
    double realized_at_horizon = 0.0;
    double pseudo_at_horizon = 0.0;
};

// Recomputes regret directly from the pull log: realized per Eq.-style
// reward accounting, pseudo as gap-weighted local pull counts. Independent
// of the online series the executor records.
RegretSeries empirical_regret(const TrialTrace& trace, const Instance& instance,
                              std::int64_t stride);

} // namespace cobandit
