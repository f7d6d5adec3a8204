#include "cobandit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cobandit/textio.hpp"

namespace cobandit {

double kl_bernoulli(double u, double v) {
    if (!(u > 0.0 && u < 1.0) || !(v > 0.0 && v < 1.0))
        throw std::domain_error("kl_bernoulli: arguments must lie strictly inside (0,1)");
    return u * std::log(u / v) + (1.0 - u) * std::log((1.0 - u) / (1.0 - v));
}

GapProfile compute_gaps(const Instance& instance) {
    const auto K = instance.num_arms;
    const auto M = instance.num_agents;
    GapProfile p;
    p.means = instance.means;

    p.pair_gap.assign(static_cast<std::size_t>(K),
                      std::vector<double>(static_cast<std::size_t>(K), 0.0));
    for (Arm a = 0; a < K; ++a)
        for (Arm b = 0; b < K; ++b)
            p.pair_gap[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                instance.means[static_cast<std::size_t>(a)] -
                instance.means[static_cast<std::size_t>(b)];

    double best_mean = *std::max_element(instance.means.begin(), instance.means.end());
    p.global_gap.resize(static_cast<std::size_t>(K));
    for (Arm i = 0; i < K; ++i)
        p.global_gap[static_cast<std::size_t>(i)] =
            best_mean - instance.means[static_cast<std::size_t>(i)];

    p.local_best.resize(static_cast<std::size_t>(M));
    p.theta.resize(static_cast<std::size_t>(M));
    for (Agent j = 0; j < M; ++j) {
        const auto& set = instance.local_sets[static_cast<std::size_t>(j)];
        Arm best = set.front();
        for (Arm a : set)
            if (instance.means[static_cast<std::size_t>(a)] >
                instance.means[static_cast<std::size_t>(best)])
                best = a;
        p.local_best[static_cast<std::size_t>(j)] = best;
        p.theta[static_cast<std::size_t>(j)] = instance.action_rate(j);
        p.theta_total += p.theta[static_cast<std::size_t>(j)];
    }

    p.holders.assign(static_cast<std::size_t>(K), {});
    p.optimal_for.assign(static_cast<std::size_t>(K), {});
    p.suboptimal_for.assign(static_cast<std::size_t>(K), {});
    p.theta_arm.assign(static_cast<std::size_t>(K), 0.0);
    for (Agent j = 0; j < M; ++j) {
        double local_best_mean =
            instance.means[static_cast<std::size_t>(p.local_best[static_cast<std::size_t>(j)])];
        for (Arm i : instance.local_sets[static_cast<std::size_t>(j)]) {
            p.holders[static_cast<std::size_t>(i)].push_back(j);
            p.theta_arm[static_cast<std::size_t>(i)] += p.theta[static_cast<std::size_t>(j)];
            // Ties share local optimality: every arm matching the best mean
            // counts as optimal for this agent.
            if (instance.means[static_cast<std::size_t>(i)] == local_best_mean)
                p.optimal_for[static_cast<std::size_t>(i)].push_back(j);
            else
                p.suboptimal_for[static_cast<std::size_t>(i)].push_back(j);
        }
    }

    p.tilde_gap.assign(static_cast<std::size_t>(K), 0.0);
    for (Arm i = 0; i < K; ++i) {
        const auto& subs = p.suboptimal_for[static_cast<std::size_t>(i)];
        if (subs.empty()) continue;
        double g = std::numeric_limits<double>::infinity();
        for (Agent j : subs) {
            Arm star = p.local_best[static_cast<std::size_t>(j)];
            g = std::min(g, p.pair_gap[static_cast<std::size_t>(star)]
                                      [static_cast<std::size_t>(i)]);
        }
        p.tilde_gap[static_cast<std::size_t>(i)] = g;
    }
    return p;
}

std::vector<std::int64_t> inbound_delays(const Instance& instance) {
    const auto M = instance.num_agents;
    std::vector<std::int64_t> d(static_cast<std::size_t>(M), 0);
    for (Agent j = 0; j < M; ++j)
        for (Agent s = 0; s < M; ++s)
            if (s != j)
                d[static_cast<std::size_t>(j)] =
                    std::max(d[static_cast<std::size_t>(j)],
                             instance.delay_matrix[static_cast<std::size_t>(s)]
                                                  [static_cast<std::size_t>(j)]);
    return d;
}

double lower_bound(const GapProfile& profile, Round horizon) {
    if (horizon < 1) throw std::invalid_argument("lower_bound: horizon must be >= 1");
    double sum = 0.0;
    for (Arm i = 0; i < profile.num_arms(); ++i) {
        double g = profile.tilde_gap[static_cast<std::size_t>(i)];
        if (g <= 0.0) continue;
        double mu = profile.means[static_cast<std::size_t>(i)];
        sum += g / kl_bernoulli(mu, mu + g);
    }
    return std::log(static_cast<double>(horizon)) * sum;
}

namespace {

// sum over holders of min{d_j * theta_j, coeff * alpha * log_inv_delta / gap^2};
// a zero gap degenerates the min to the delay term.
double delay_cap_sum(const GapProfile& profile, Arm i, double alpha, double log_inv_delta,
                     const std::vector<std::int64_t>& delays, double coeff) {
    double sum = 0.0;
    for (Agent j : profile.holders[static_cast<std::size_t>(i)]) {
        double dj_theta = static_cast<double>(delays[static_cast<std::size_t>(j)]) *
                          profile.theta[static_cast<std::size_t>(j)];
        Arm star = profile.local_best[static_cast<std::size_t>(j)];
        double gap =
            profile.pair_gap[static_cast<std::size_t>(star)][static_cast<std::size_t>(i)];
        if (gap <= 0.0) {
            sum += dj_theta;
        } else {
            sum += std::min(dj_theta, coeff * alpha * log_inv_delta / (gap * gap));
        }
    }
    return sum;
}

void check_bound_args(const GapProfile& profile, Round horizon, double alpha,
                      const std::vector<std::int64_t>& delays) {
    if (!(alpha > 2.0)) throw std::invalid_argument("regret bound: alpha must be > 2");
    if (horizon < 1) throw std::invalid_argument("regret bound: horizon must be >= 1");
    if (static_cast<std::int32_t>(delays.size()) != profile.num_agents())
        throw std::invalid_argument("regret bound: delay vector size mismatch");
}

double lower_bound_or_nan(const GapProfile& profile, Round horizon) {
    try {
        return lower_bound(profile, horizon);
    } catch (const std::domain_error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

} // namespace

double q2_term(const GapProfile& profile, double alpha) {
    if (!(alpha > 2.0)) throw std::invalid_argument("q2_term: alpha must be > 2");
    double sum = 0.0;
    for (double th : profile.theta)
        sum += profile.theta_total * std::pow(th, alpha - 1.0);
    return 2.0 / (alpha - 2.0) * sum;
}

double q1_raw(const Instance& instance, const DeltaSchedule& schedule, double alpha) {
    if (!(alpha > 2.0)) throw std::invalid_argument("q1_raw: alpha must be > 2");
    GapProfile p = compute_gaps(instance);
    double total = 0.0;
    for (Agent j = 0; j < instance.num_agents; ++j) {
        double theta_sum = 0.0; // sum of Theta_i over the agent's local arms
        for (Arm i : instance.local_sets[static_cast<std::size_t>(j)])
            theta_sum += p.theta_arm[static_cast<std::size_t>(i)];
        double theta_j = p.theta[static_cast<std::size_t>(j)];
        auto gap = instance.inter_round_gaps[static_cast<std::size_t>(j)];
        std::int64_t n = instance.num_decisions(j);
        double agent_sum = 0.0;
        for (std::int64_t l = 1; l <= n; ++l) {
            Round t = l * gap;
            agent_sum += static_cast<double>(l) / theta_j *
                         std::pow(schedule.at(t), alpha);
        }
        total += theta_sum * agent_sum;
    }
    return 2.0 * total;
}

double coucb_regret_bound(const GapProfile& profile, Round horizon, double alpha,
                          const std::vector<std::int64_t>& delays) {
    check_bound_args(profile, horizon, alpha, delays);
    double log_t = std::log(static_cast<double>(horizon));
    double sum = 0.0;
    for (Arm i = 0; i < profile.num_arms(); ++i) {
        double g = profile.tilde_gap[static_cast<std::size_t>(i)];
        if (g <= 0.0) continue;
        sum += 6.0 * alpha * log_t / g +
               delay_cap_sum(profile, i, alpha, log_t, delays, 2.0) + 1.0;
    }
    return sum + q2_term(profile, alpha);
}

double coaae_regret_bound(const GapProfile& profile, Round horizon, double alpha,
                          const std::vector<std::int64_t>& delays) {
    check_bound_args(profile, horizon, alpha, delays);
    double log_t = std::log(static_cast<double>(horizon));
    double sum = 0.0;
    for (Arm i = 0; i < profile.num_arms(); ++i) {
        double g = profile.tilde_gap[static_cast<std::size_t>(i)];
        if (g <= 0.0) continue;
        sum += 24.0 * alpha * log_t / g +
               delay_cap_sum(profile, i, alpha, log_t, delays, 8.0) + 1.0;
    }
    return sum + q2_term(profile, alpha);
}

CommBounds comm_bounds(const GapProfile& profile, Round horizon, double alpha,
                       const std::vector<std::int64_t>& delays) {
    check_bound_args(profile, horizon, alpha, delays);
    CommBounds out;
    out.coucb = static_cast<double>(profile.num_agents()) * profile.theta_total *
                static_cast<double>(horizon);
    double log_t = std::log(static_cast<double>(horizon));
    double q2 = q2_term(profile, alpha);
    for (Arm i = 0; i < profile.num_arms(); ++i) {
        double g = profile.tilde_gap[static_cast<std::size_t>(i)];
        double term = q2 + 1.0;
        if (g > 0.0) term += 8.0 * alpha * log_t / (g * g);
        for (Agent j : profile.suboptimal_for[static_cast<std::size_t>(i)])
            term += static_cast<double>(delays[static_cast<std::size_t>(j)]) *
                    profile.theta[static_cast<std::size_t>(j)];
        auto m_i = static_cast<double>(profile.holders[static_cast<std::size_t>(i)].size());
        out.coaae += term * (static_cast<double>(profile.num_agents()) + m_i);
    }
    return out;
}

std::string bound_report_text(const GapProfile& profile, Round horizon, double alpha,
                              const std::vector<std::int64_t>& delays) {
    check_bound_args(profile, horizon, alpha, delays);
    double log_t = std::log(static_cast<double>(horizon));
    std::ostringstream out;
    out << "horizon " << horizon << "\n";
    out << "alpha " << fmt_double(alpha) << "\n";
    out << "theta_total " << fmt_double(profile.theta_total) << "\n";
    out << "q2 " << fmt_double(q2_term(profile, alpha)) << "\n";
    out << "arm mean tilde_gap holders lower_term coucb_term coaae_term coaae_comm_term\n";
    for (Arm i = 0; i < profile.num_arms(); ++i) {
        double g = profile.tilde_gap[static_cast<std::size_t>(i)];
        double mu = profile.means[static_cast<std::size_t>(i)];
        double lower_term = 0.0, coucb_term = 0.0, coaae_term = 0.0;
        if (g > 0.0) {
            if (mu > 0.0 && mu + g < 1.0)
                lower_term = log_t * g / kl_bernoulli(mu, mu + g);
            coucb_term = 6.0 * alpha * log_t / g +
                         delay_cap_sum(profile, i, alpha, log_t, delays, 2.0) + 1.0;
            coaae_term = 24.0 * alpha * log_t / g +
                         delay_cap_sum(profile, i, alpha, log_t, delays, 8.0) + 1.0;
        }
        double comm_term = q2_term(profile, alpha) + 1.0;
        if (g > 0.0) comm_term += 8.0 * alpha * log_t / (g * g);
        for (Agent j : profile.suboptimal_for[static_cast<std::size_t>(i)])
            comm_term += static_cast<double>(delays[static_cast<std::size_t>(j)]) *
                         profile.theta[static_cast<std::size_t>(j)];
        comm_term *= static_cast<double>(profile.num_agents()) +
                     static_cast<double>(profile.holders[static_cast<std::size_t>(i)].size());
        out << i << " " << fmt_double(mu) << " " << fmt_double(g) << " "
            << profile.holders[static_cast<std::size_t>(i)].size() << " "
            << fmt_double(lower_term) << " " << fmt_double(coucb_term) << " "
            << fmt_double(coaae_term) << " " << fmt_double(comm_term) << "\n";
    }
    CommBounds cb = comm_bounds(profile, horizon, alpha, delays);
    out << "total lower_bound " << fmt_double(lower_bound_or_nan(profile, horizon)) << "\n";
    out << "total coucb_regret "
        << fmt_double(coucb_regret_bound(profile, horizon, alpha, delays)) << "\n";
    out << "total coaae_regret "
        << fmt_double(coaae_regret_bound(profile, horizon, alpha, delays)) << "\n";
    out << "total coucb_comm " << fmt_double(cb.coucb) << "\n";
    out << "total coaae_comm " << fmt_double(cb.coaae) << "\n";
    return out.str();
}

RegretSeries empirical_regret(const TrialTrace& trace, const Instance& instance,
                              std::int64_t stride) {
    if (trace.num_agents != instance.num_agents || trace.num_arms != instance.num_arms ||
        trace.horizon != instance.horizon)
        throw std::invalid_argument("empirical_regret: trace/instance mismatch");
    if (stride < 1 || instance.horizon % stride != 0)
        throw std::invalid_argument("empirical_regret: stride must divide the horizon");

    GapProfile profile = compute_gaps(instance);
    const auto M = instance.num_agents;
    RegretSeries out;
    auto points = static_cast<std::size_t>(instance.horizon / stride);
    out.rounds.resize(points);
    out.realized.assign(points, 0.0);
    out.pseudo.assign(points, 0.0);
    for (std::size_t k = 0; k < points; ++k)
        out.rounds[k] = static_cast<Round>(k + 1) * stride;

    out.agent_realized_final.assign(static_cast<std::size_t>(M), 0.0);
    out.agent_pseudo_final.assign(static_cast<std::size_t>(M), 0.0);

    for (Agent j = 0; j < M; ++j) {
        Arm star = profile.local_best[static_cast<std::size_t>(j)];
        double mu_star = instance.means[static_cast<std::size_t>(star)];
        double reward_sum = 0.0, pseudo_sum = 0.0;
        std::size_t k = 0;
        std::int64_t decisions = 0;
        for (const auto& rec : trace.pulls[static_cast<std::size_t>(j)]) {
            while (k < points && out.rounds[k] < rec.round) {
                out.realized[k] += mu_star * static_cast<double>(decisions) - reward_sum;
                out.pseudo[k] += pseudo_sum;
                ++k;
            }
            ++decisions;
            reward_sum += static_cast<double>(rec.reward);
            pseudo_sum += profile.pair_gap[static_cast<std::size_t>(star)]
                                          [static_cast<std::size_t>(rec.arm)];
        }
        for (; k < points; ++k) {
            out.realized[k] += mu_star * static_cast<double>(decisions) - reward_sum;
            out.pseudo[k] += pseudo_sum;
        }
        out.agent_realized_final[static_cast<std::size_t>(j)] =
            mu_star * static_cast<double>(decisions) - reward_sum;
        out.agent_pseudo_final[static_cast<std::size_t>(j)] = pseudo_sum;
    }
    out.realized_at_horizon = out.realized.empty() ? 0.0 : out.realized.back();
    out.pseudo_at_horizon = out.pseudo.empty() ? 0.0 : out.pseudo.back();
    return out;
}

} // namespace cobandit
