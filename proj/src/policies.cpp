#include "cobandit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cobandit/textio.hpp"

namespace cobandit {

DeltaSchedule DeltaSchedule::fixed(double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("DeltaSchedule: constant delta must be in (0,1]");
    return {Kind::Constant, delta};
}

double confidence_width(std::int64_t count, double alpha, double delta) {
    if (count < 1)
        throw std::invalid_argument("confidence_width: count must be >= 1");
    if (!(alpha > 2.0))
        throw std::invalid_argument("confidence_width: alpha must be > 2");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("confidence_width: delta must be in (0,1]");
    return std::sqrt(alpha * std::log(1.0 / delta) / (2.0 * static_cast<double>(count)));
}

EstimatorState::EstimatorState(std::int32_t num_arms, std::vector<Arm> local_set,
                               double alpha, DeltaSchedule schedule)
    : local_set_(std::move(local_set)),
      alpha_(alpha),
      schedule_(schedule),
      counts_(static_cast<std::size_t>(num_arms), 0),
      means_(static_cast<std::size_t>(num_arms), 0.0) {
    if (local_set_.empty())
        throw std::invalid_argument("EstimatorState: empty local set");
    if (!(alpha > 2.0))
        throw std::invalid_argument("EstimatorState: alpha must be > 2");
    std::sort(local_set_.begin(), local_set_.end());
    for (Arm a : local_set_)
        if (a < 0 || a >= num_arms)
            throw std::invalid_argument("EstimatorState: local arm out of range");
}

bool EstimatorState::is_local(Arm arm) const {
    return std::binary_search(local_set_.begin(), local_set_.end(), arm);
}

void EstimatorState::observe(Arm arm, int reward) {
    if (!is_local(arm))
        throw std::invalid_argument("EstimatorState::observe: arm not in local set");
    auto idx = static_cast<std::size_t>(arm);
    std::int64_t n = ++counts_[idx];
    means_[idx] += (static_cast<double>(reward) - means_[idx]) / static_cast<double>(n);
}

void EstimatorState::set_statistics(Arm arm, std::int64_t count, double mean) {
    if (!is_local(arm))
        throw std::invalid_argument("EstimatorState::set_statistics: arm not in local set");
    if (count < 0)
        throw std::invalid_argument("EstimatorState::set_statistics: negative count");
    if (count > 0 && !(mean >= 0.0 && mean <= 1.0))
        throw std::invalid_argument("EstimatorState::set_statistics: mean outside [0,1]");
    counts_[static_cast<std::size_t>(arm)] = count;
    means_[static_cast<std::size_t>(arm)] = count == 0 ? 0.0 : mean;
}

Arm select_ucb(const EstimatorState& state, Round t) {
    const auto& local = state.local_set();
    for (Arm a : local)
        if (state.count(a) == 0) return a; // forced exploration, lowest index first

    Arm best = local.front();
    double best_score = state.upper(best, t);
    for (std::size_t k = 1; k < local.size(); ++k) {
        double score = state.upper(local[k], t);
        if (score > best_score) {
            best_score = score;
            best = local[k];
        }
    }
    return best;
}

CandidateSet::CandidateSet(const Instance& instance, Agent owner)
    : owner_(owner),
      own_(instance.local_sets[static_cast<std::size_t>(owner)]),
      peer_view_(static_cast<std::size_t>(instance.num_agents)) {
    for (Agent j = 0; j < instance.num_agents; ++j)
        if (j != owner)
            peer_view_[static_cast<std::size_t>(j)] =
                instance.local_sets[static_cast<std::size_t>(j)];
}

bool CandidateSet::own_contains(Arm arm) const {
    return std::binary_search(own_.begin(), own_.end(), arm);
}

bool CandidateSet::peer_contains(Agent other, Arm arm) const {
    const auto& v = peer_view_[static_cast<std::size_t>(other)];
    return std::binary_search(v.begin(), v.end(), arm);
}

void CandidateSet::remove_own(Arm arm) {
    auto it = std::lower_bound(own_.begin(), own_.end(), arm);
    if (it != own_.end() && *it == arm) own_.erase(it);
}

void CandidateSet::remove_peer(Agent other, const std::vector<Arm>& arms) {
    auto& v = peer_view_[static_cast<std::size_t>(other)];
    for (Arm arm : arms) {
        auto it = std::lower_bound(v.begin(), v.end(), arm);
        if (it != v.end() && *it == arm) v.erase(it);
    }
}

std::vector<Arm> refresh_candidates(const EstimatorState& state, CandidateSet& cands,
                                    Round t) {
    const auto& local = state.local_set();

    // Highest lower bound among observed local arms; Eq.-style elimination
    // compares every candidate against every local arm, and only the best
    // lower bound can dominate.
    bool have_dominator = false;
    double best_lower = 0.0;
    for (Arm a : local) {
        if (state.count(a) == 0) continue;
        double lo = state.lower(a, t);
        if (!have_dominator || lo > best_lower) {
            best_lower = lo;
            have_dominator = true;
        }
    }
    if (!have_dominator) return {};

    std::vector<Arm> eliminated;
    for (Arm a : cands.own()) {
        if (state.count(a) == 0) continue; // no data, never eliminate
        if (best_lower > state.upper(a, t)) eliminated.push_back(a);
    }
    for (Arm a : eliminated) cands.remove_own(a);
    return eliminated;
}

Arm select_aae(const CandidateSet& cands, const EstimatorState& state) {
    if (cands.own().empty())
        throw InvariantViolation("select_aae: empty candidate set for agent " +
                                 std::to_string(cands.owner()) + "\n" +
                                 snapshot_text(state, &cands));
    Arm best = cands.own().front();
    std::int64_t best_count = state.count(best);
    for (Arm a : cands.own()) {
        if (state.count(a) < best_count) {
            best = a;
            best_count = state.count(a);
        }
    }
    return best;
}

bool confidence_violated(const EstimatorState& state, const std::vector<double>& true_means,
                         Round t) {
    for (Arm a : state.local_set()) {
        if (state.count(a) == 0) continue;
        double w = state.width(a, t);
        double mu = true_means[static_cast<std::size_t>(a)];
        if (mu > state.mean(a) + w || mu < state.mean(a) - w) return true;
    }
    return false;
}

std::string snapshot_text(const EstimatorState& state, const CandidateSet* cands) {
    std::ostringstream out;
    out << "arm count mean\n";
    for (Arm a : state.local_set())
        out << a << " " << state.count(a) << " " << fmt_double(state.mean(a)) << "\n";
    if (cands) {
        out << "candidates";
        for (Arm a : cands->own()) out << " " << a;
        out << "\n";
    }
    return out.str();
}

} // namespace cobandit
