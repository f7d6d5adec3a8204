#include "cobandit/sim.hpp"

#include <stdexcept>

namespace cobandit {

const char* algorithm_name(Algorithm algo) {
    switch (algo) {
    case Algorithm::CoUcb: return "co_ucb";
    case Algorithm::CoAae: return "co_aae";
    case Algorithm::IndUcb: return "ind_ucb";
    case Algorithm::IndAae: return "ind_aae";
    }
    return "?";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
    if (name == "co_ucb") return Algorithm::CoUcb;
    if (name == "co_aae") return Algorithm::CoAae;
    if (name == "ind_ucb") return Algorithm::IndUcb;
    if (name == "ind_aae") return Algorithm::IndAae;
    return std::nullopt;
}

bool is_cooperative(Algorithm algo) {
    return algo == Algorithm::CoUcb || algo == Algorithm::CoAae;
}

bool uses_elimination(Algorithm algo) {
    return algo == Algorithm::CoAae || algo == Algorithm::IndAae;
}

TrialTrace simulate(const Instance& instance, Algorithm algo, std::uint64_t trial_seed,
                    const SimOptions& opts) {
    instance.validate();
    if (opts.stride < 1 || instance.horizon % opts.stride != 0)
        throw std::invalid_argument("simulate: stride must divide the horizon");

    const auto M = instance.num_agents;
    const bool coop = is_cooperative(algo);
    const bool aae = uses_elimination(algo);

    RewardSource rewards(instance, trial_seed);
    DelayedBus bus(instance, opts.keep_message_log);

    std::vector<EstimatorState> states;
    states.reserve(static_cast<std::size_t>(M));
    std::vector<CandidateSet> cands;
    for (Agent j = 0; j < M; ++j) {
        states.emplace_back(instance.num_arms,
                            instance.local_sets[static_cast<std::size_t>(j)], opts.alpha,
                            opts.schedule);
        if (aae) cands.emplace_back(instance, j);
    }

    GapProfile profile = compute_gaps(instance);

    TrialTrace trace;
    trace.num_arms = instance.num_arms;
    trace.num_agents = M;
    trace.horizon = instance.horizon;
    trace.stride = opts.stride;
    trace.pulls.resize(static_cast<std::size_t>(M));
    trace.local_pulls.assign(static_cast<std::size_t>(M),
                             std::vector<std::int64_t>(static_cast<std::size_t>(instance.num_arms), 0));
    if (opts.keep_pull_log)
        for (Agent j = 0; j < M; ++j)
            trace.pulls[static_cast<std::size_t>(j)].reserve(
                static_cast<std::size_t>(instance.num_decisions(j)));
    trace.series.reserve(static_cast<std::size_t>(instance.horizon / opts.stride));

    std::vector<std::int64_t> decisions(static_cast<std::size_t>(M), 0);
    std::vector<double> reward_sum(static_cast<std::size_t>(M), 0.0);
    std::vector<double> pseudo_sum(static_cast<std::size_t>(M), 0.0);

    for (Round t = 1; t <= instance.horizon; ++t) {
        for (Agent j = 0; j < M; ++j) {
            auto& state = states[static_cast<std::size_t>(j)];

            if (coop) {
                for (const auto& msg : bus.deliver(j, t)) {
                    if (msg.kind == MessageKind::Observation) {
                        state.observe(msg.arm, msg.reward);
                        if (aae) {
                            auto gone = refresh_candidates(
                                state, cands[static_cast<std::size_t>(j)], t);
                            if (!gone.empty()) bus.broadcast_elimination(j, gone, t);
                        }
                    } else {
                        if (aae)
                            cands[static_cast<std::size_t>(j)].remove_peer(msg.origin,
                                                                           msg.arms);
                    }
                }
            }

            if (t % instance.inter_round_gaps[static_cast<std::size_t>(j)] != 0) continue;

            bool covered = true;
            if (opts.check_confidence) {
                covered = !confidence_violated(state, instance.means, t);
                if (!covered) trace.confidence_violation = true;
            }

            Arm arm = aae ? select_aae(cands[static_cast<std::size_t>(j)], state)
                          : select_ucb(state, t);
            std::int64_t nhat_before = state.count(arm);

            if (opts.on_decision) {
                DecisionAudit audit;
                audit.agent = j;
                audit.round = t;
                audit.chosen = arm;
                audit.nhat_before = nhat_before;
                audit.state = &state;
                audit.cands = aae ? &cands[static_cast<std::size_t>(j)] : nullptr;
                opts.on_decision(audit);
            }

            int reward = rewards.draw(arm);
            state.observe(arm, reward);
            ++trace.local_pulls[static_cast<std::size_t>(j)][static_cast<std::size_t>(arm)];
            ++decisions[static_cast<std::size_t>(j)];
            reward_sum[static_cast<std::size_t>(j)] += static_cast<double>(reward);
            Arm star = profile.local_best[static_cast<std::size_t>(j)];
            pseudo_sum[static_cast<std::size_t>(j)] +=
                profile.pair_gap[static_cast<std::size_t>(star)][static_cast<std::size_t>(arm)];

            if (aae) {
                auto gone = refresh_candidates(state, cands[static_cast<std::size_t>(j)], t);
                if (coop && !gone.empty()) bus.broadcast_elimination(j, gone, t);
            }
            if (coop) {
                if (aae)
                    bus.broadcast_observation_aae(j, arm, reward, t,
                                                  cands[static_cast<std::size_t>(j)]);
                else
                    bus.broadcast_observation_ucb(j, arm, reward, t);
            }

            if (opts.keep_pull_log) {
                PullRecord rec;
                rec.round = t;
                rec.arm = arm;
                rec.reward = reward;
                rec.nhat_before = nhat_before;
                rec.covered = covered;
                trace.pulls[static_cast<std::size_t>(j)].push_back(rec);
            }
        }

        if (t % opts.stride == 0) {
            SeriesPoint pt;
            pt.round = t;
            for (Agent j = 0; j < M; ++j) {
                Arm star = profile.local_best[static_cast<std::size_t>(j)];
                pt.regret_realized +=
                    instance.means[static_cast<std::size_t>(star)] *
                        static_cast<double>(decisions[static_cast<std::size_t>(j)]) -
                    reward_sum[static_cast<std::size_t>(j)];
                pt.regret_pseudo += pseudo_sum[static_cast<std::size_t>(j)];
            }
            pt.messages = bus.sent_count();
            trace.series.push_back(pt);
        }
    }

    trace.agent_realized.resize(static_cast<std::size_t>(M));
    trace.agent_pseudo.resize(static_cast<std::size_t>(M));
    for (Agent j = 0; j < M; ++j) {
        Arm star = profile.local_best[static_cast<std::size_t>(j)];
        trace.agent_realized[static_cast<std::size_t>(j)] =
            instance.means[static_cast<std::size_t>(star)] *
                static_cast<double>(decisions[static_cast<std::size_t>(j)]) -
            reward_sum[static_cast<std::size_t>(j)];
        trace.agent_pseudo[static_cast<std::size_t>(j)] =
            pseudo_sum[static_cast<std::size_t>(j)];
    }
    trace.messages_sent = bus.sent_count();
    trace.observations_sent = bus.observation_count();
    trace.eliminations_sent = bus.elimination_count();
    trace.messages_delivered = bus.delivered_count();
    trace.messages_in_flight = bus.in_flight();
    if (aae) {
        trace.final_candidates.resize(static_cast<std::size_t>(M));
        for (Agent j = 0; j < M; ++j)
            trace.final_candidates[static_cast<std::size_t>(j)] =
                cands[static_cast<std::size_t>(j)].own();
    }
    if (opts.keep_message_log) trace.message_log = bus.log();
    return trace;
}

} // namespace cobandit
