#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cobandit/rng.hpp"

// Problem instances, decision schedules and the Bernoulli reward source for
// cooperative bandits with partial arm access, per-agent action rates and
// deterministic pairwise communication delays.
//
// Conventions: arms and agents are 0-based everywhere, including file
// formats. Rounds run 1..horizon on a single global clock; agent j decides
// at rounds gap_j, 2*gap_j, ..., N_j*gap_j with N_j = floor(horizon/gap_j).

namespace cobandit {

using Arm = std::int32_t;
using Agent = std::int32_t;
using Round = std::int64_t;

struct Instance {
    std::int32_t num_arms = 0;
    std::int32_t num_agents = 0;
    Round horizon = 0;
    std::vector<double> means;                    // size K, each in [0,1]
    std::vector<std::vector<Arm>> local_sets;     // size M, sorted, nonempty
    std::vector<std::int64_t> inter_round_gaps;   // size M, each >= 1
    std::vector<std::vector<std::int64_t>> delay_matrix; // MxM, diag 0

    double action_rate(Agent j) const { return 1.0 / static_cast<double>(inter_round_gaps[j]); }
    std::int64_t num_decisions(Agent j) const { return horizon / inter_round_gaps[j]; }
    bool is_local(Agent j, Arm i) const;
    // Agent j's ordered decision rounds (gap, 2*gap, ..., N_j*gap).
    std::vector<Round> schedule(Agent j) const;

    // Throws std::invalid_argument on any violated field invariant.
    void validate() const;
};

// Ordered decision rounds (gap, 2*gap, ..., N*gap); empty when gap > horizon.
std::vector<Round> decision_rounds(std::int64_t gap, Round horizon);

// Per-arm reward streams: the p-th pull of arm i draws from a counter-based
// stream keyed by (seed, i, p), so the rewards an arm yields do not depend on
// which agents pull it or on how many agents exist.
class RewardSource {
public:
    RewardSource(const Instance& instance, std::uint64_t seed);

    // 0/1 reward for the next pull of `arm`. Throws std::out_of_range.
    int draw(Arm arm);

    std::int64_t pulls(Arm arm) const { return next_ordinal_[static_cast<std::size_t>(arm)]; }

private:
    const Instance* instance_;
    std::uint64_t seed_;
    std::vector<std::int64_t> next_ordinal_;
};

enum class MeanSource { Uniform, File };
enum class DelayRule { Constant, MatrixFile, PerTrialUniform };

struct GenerationSpec {
    std::int32_t num_arms = 0;
    std::int32_t num_agents = 0;
    std::int32_t local_set_size = 0;
    std::vector<std::int64_t> gap_choices = {1, 2, 3, 4}; // omega_j drawn uniformly
    MeanSource mean_source = MeanSource::Uniform;
    std::string mean_file;
    DelayRule delay_rule = DelayRule::Constant;
    std::int64_t delay_constant = 0;
    std::string delay_matrix_file;
    double delay_uniform_avg = 0; // PerTrialUniform: pairwise U[0.5*avg, 1.5*avg]
};

// Deterministic function of (spec, seed); independent of the horizon, which
// is attached afterwards. PerTrialUniform specs get a zero matrix here; the
// per-trial matrix comes from draw_delay_matrix.
Instance generate_instance(const GenerationSpec& spec, Round horizon, std::uint64_t seed);

std::vector<std::vector<std::int64_t>> draw_delay_matrix(std::int32_t num_agents,
                                                         double average_delay,
                                                         std::uint64_t seed);

// One real per line, all in [0,1]; rejects empty files, junk lines and
// out-of-range values (no silent clamping).
std::vector<double> load_means(const std::string& path);

// Key/value text round-trip of every Instance field.
std::string instance_to_text(const Instance& instance);
Instance instance_from_text(const std::string& text, const std::string& origin);

} // namespace cobandit
