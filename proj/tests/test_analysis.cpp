#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cobandit/analysis.hpp"
#include "cobandit/rng.hpp"
#include "cobandit/sim.hpp"

using namespace cobandit;

namespace {

Instance random_instance(SplitMix& rng, std::int32_t max_arms = 8, std::int32_t max_agents = 5,
                         std::int64_t max_delay = 0) {
    Instance inst;
    inst.num_arms = static_cast<std::int32_t>(rng.next_range(1, max_arms));
    inst.num_agents = static_cast<std::int32_t>(rng.next_range(1, max_agents));
    inst.horizon = rng.next_range(100, 50000);
    inst.means.resize(static_cast<std::size_t>(inst.num_arms));
    for (auto& m : inst.means) m = rng.next_unit();
    for (std::int32_t j = 0; j < inst.num_agents; ++j) {
        auto size = rng.next_range(1, inst.num_arms);
        std::vector<Arm> pool;
        for (Arm a = 0; a < inst.num_arms; ++a) pool.push_back(a);
        for (std::int64_t k = 0; k < size; ++k) {
            auto pick = static_cast<std::size_t>(k) +
                        static_cast<std::size_t>(rng.next_below(pool.size() - static_cast<std::size_t>(k)));
            std::swap(pool[static_cast<std::size_t>(k)], pool[pick]);
        }
        std::vector<Arm> set(pool.begin(), pool.begin() + size);
        std::sort(set.begin(), set.end());
        inst.local_sets.push_back(std::move(set));
        inst.inter_round_gaps.push_back(rng.next_range(1, 4));
    }
    inst.delay_matrix.assign(static_cast<std::size_t>(inst.num_agents),
                             std::vector<std::int64_t>(static_cast<std::size_t>(inst.num_agents), 0));
    if (max_delay > 0)
        for (std::int32_t a = 0; a < inst.num_agents; ++a)
            for (std::int32_t b = 0; b < inst.num_agents; ++b)
                if (a != b)
                    inst.delay_matrix[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                        rng.next_range(0, max_delay);
    inst.validate();
    return inst;
}

// Exhaustive double-loop recomputation of the agent-specific gap.
double oracle_tilde_gap(const Instance& inst, Arm i) {
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (Agent j = 0; j < inst.num_agents; ++j) {
        if (!inst.is_local(j, i)) continue;
        double local_max = 0.0;
        for (Arm a : inst.local_sets[static_cast<std::size_t>(j)])
            local_max = std::max(local_max, inst.means[static_cast<std::size_t>(a)]);
        double gap = local_max - inst.means[static_cast<std::size_t>(i)];
        if (gap > 0.0) { // agent holds i as a suboptimal arm
            best = std::min(best, gap);
            found = true;
        }
    }
    return found ? best : 0.0;
}

double oracle_q2(const Instance& inst, double alpha) {
    double theta_total = 0.0;
    for (auto g : inst.inter_round_gaps) theta_total += 1.0 / static_cast<double>(g);
    double sum = 0.0;
    for (auto g : inst.inter_round_gaps)
        sum += theta_total * std::pow(1.0 / static_cast<double>(g), alpha - 1.0);
    return 2.0 / (alpha - 2.0) * sum;
}

// Term-by-term recomputation of the cooperative regret bounds straight from
// the instance.
double oracle_regret_bound(const Instance& inst, Round horizon, double alpha,
                           const std::vector<std::int64_t>& delays, double lead,
                           double cap_coeff) {
    double log_t = std::log(static_cast<double>(horizon));
    double total = 0.0;
    for (Arm i = 0; i < inst.num_arms; ++i) {
        double tg = oracle_tilde_gap(inst, i);
        if (tg <= 0.0) continue;
        double f = 0.0;
        for (Agent j = 0; j < inst.num_agents; ++j) {
            if (!inst.is_local(j, i)) continue;
            double dj_theta = static_cast<double>(delays[static_cast<std::size_t>(j)]) /
                              static_cast<double>(inst.inter_round_gaps[static_cast<std::size_t>(j)]);
            double local_max = 0.0;
            for (Arm a : inst.local_sets[static_cast<std::size_t>(j)])
                local_max = std::max(local_max, inst.means[static_cast<std::size_t>(a)]);
            double gap = local_max - inst.means[static_cast<std::size_t>(i)];
            if (gap > 0.0)
                f += std::min(dj_theta, cap_coeff * alpha * log_t / (gap * gap));
            else
                f += dj_theta;
        }
        total += lead * alpha * log_t / tg + f + 1.0;
    }
    return total + oracle_q2(inst, alpha);
}

double oracle_coaae_comm(const Instance& inst, Round horizon, double alpha,
                         const std::vector<std::int64_t>& delays) {
    double log_t = std::log(static_cast<double>(horizon));
    double total = 0.0;
    for (Arm i = 0; i < inst.num_arms; ++i) {
        double tg = oracle_tilde_gap(inst, i);
        double term = oracle_q2(inst, alpha) + 1.0;
        if (tg > 0.0) term += 8.0 * alpha * log_t / (tg * tg);
        double m_i = 0.0;
        for (Agent j = 0; j < inst.num_agents; ++j) {
            if (!inst.is_local(j, i)) continue;
            m_i += 1.0;
            double local_max = 0.0;
            for (Arm a : inst.local_sets[static_cast<std::size_t>(j)])
                local_max = std::max(local_max, inst.means[static_cast<std::size_t>(a)]);
            if (local_max > inst.means[static_cast<std::size_t>(i)])
                term += static_cast<double>(delays[static_cast<std::size_t>(j)]) /
                        static_cast<double>(inst.inter_round_gaps[static_cast<std::size_t>(j)]);
        }
        total += term * (static_cast<double>(inst.num_agents) + m_i);
    }
    return total;
}

bool close_rel(double a, double b, double tol = 1e-9) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace

TEST_CASE("bernoulli kl basics and frozen value") {
    CHECK(kl_bernoulli(0.5, 0.5) == 0.0);
    CHECK(kl_bernoulli(0.3, 0.3) == 0.0);
    // frozen independent evaluation of 0.5*ln(2) + 0.5*ln(0.5/0.75)
    CHECK(kl_bernoulli(0.5, 0.25) == doctest::Approx(0.14384103622589042).epsilon(1e-12));
    CHECK(kl_bernoulli(0.2, 0.6) > 0.0);
    CHECK_THROWS_AS(kl_bernoulli(0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(kl_bernoulli(0.5, 1.0), std::domain_error);
}

TEST_CASE("kl symmetry under complement") {
    SplitMix rng(1);
    for (int it = 0; it < 500; ++it) {
        double u = 0.01 + 0.98 * rng.next_unit();
        double v = 0.01 + 0.98 * rng.next_unit();
        CHECK(kl_bernoulli(u, v) == doctest::Approx(kl_bernoulli(1.0 - u, 1.0 - v)).epsilon(1e-12));
    }
}

TEST_CASE("kl sandwich bounds") {
    SplitMix rng(2);
    for (int it = 0; it < 2000; ++it) {
        double mu = 0.01 + 0.6 * rng.next_unit();
        double x = 0.01 + (0.98 - mu) * rng.next_unit();
        double kl = kl_bernoulli(mu, mu + x);
        CHECK(2.0 * x * x <= kl + 1e-12);
        CHECK(kl <= x * x / ((mu + x) * (1.0 - mu - x)) + 1e-12);
    }
}

TEST_CASE("gap profile on a two-arm single agent") {
    Instance inst;
    inst.num_arms = 2;
    inst.num_agents = 1;
    inst.horizon = 100;
    inst.means = {0.9, 0.5};
    inst.local_sets = {{0, 1}};
    inst.inter_round_gaps = {1};
    inst.delay_matrix = {{0}};
    GapProfile p = compute_gaps(inst);
    CHECK(p.tilde_gap[1] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(p.tilde_gap[0] == 0.0); // locally optimal, no suboptimal holder
    CHECK(p.local_best[0] == 0);
    CHECK(p.holders[0].size() == 1);
    CHECK(p.optimal_for[0].size() == 1);
    CHECK(p.suboptimal_for[1].size() == 1);
    CHECK(p.theta_total == 1.0);
}

TEST_CASE("arm optimal for every holder has zero tilde gap") {
    Instance inst;
    inst.num_arms = 3;
    inst.num_agents = 2;
    inst.horizon = 100;
    inst.means = {0.8, 0.8, 0.2};
    inst.local_sets = {{0, 2}, {0, 1}};
    inst.inter_round_gaps = {1, 2};
    inst.delay_matrix = {{0, 0}, {0, 0}};
    GapProfile p = compute_gaps(inst);
    CHECK(p.tilde_gap[0] == 0.0);
    CHECK(p.tilde_gap[1] == 0.0); // ties with arm 0 for agent 1
    CHECK(p.tilde_gap[2] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("gap profile matches the brute-force oracle across sizes") {
    SplitMix rng(77);
    for (int it = 0; it < 400; ++it) {
        Instance inst = random_instance(rng);
        GapProfile p = compute_gaps(inst);
        for (Arm i = 0; i < inst.num_arms; ++i) {
            CHECK(close_rel(p.tilde_gap[static_cast<std::size_t>(i)], oracle_tilde_gap(inst, i)));
            CHECK(p.holders[static_cast<std::size_t>(i)].size() ==
                  p.optimal_for[static_cast<std::size_t>(i)].size() +
                      p.suboptimal_for[static_cast<std::size_t>(i)].size());
            double sum_theta = 0.0;
            for (Agent j : p.holders[static_cast<std::size_t>(i)])
                sum_theta += p.theta[static_cast<std::size_t>(j)];
            CHECK(close_rel(p.theta_arm[static_cast<std::size_t>(i)], sum_theta));
        }
        // tilde gap never exceeds any suboptimal holder's own gap
        for (Arm i = 0; i < inst.num_arms; ++i)
            for (Agent j : p.suboptimal_for[static_cast<std::size_t>(i)]) {
                Arm star = p.local_best[static_cast<std::size_t>(j)];
                CHECK(p.tilde_gap[static_cast<std::size_t>(i)] <=
                      p.pair_gap[static_cast<std::size_t>(star)][static_cast<std::size_t>(i)] + 1e-12);
            }
    }
}

TEST_CASE("lower bound formula") {
    Instance inst;
    inst.num_arms = 2;
    inst.num_agents = 1;
    inst.horizon = 3; // ln used explicitly below
    inst.means = {0.75, 0.5};
    inst.local_sets = {{0, 1}};
    inst.inter_round_gaps = {1};
    inst.delay_matrix = {{0}};
    GapProfile p = compute_gaps(inst);
    // single gap arm: mu=0.5, tilde=0.25; frozen 0.25/KL(0.5,0.75)
    double expected = 1.738029748391104;
    CHECK(lower_bound(p, 3) == doctest::Approx(std::log(3.0) * expected).epsilon(1e-12));
    // scales exactly with ln T
    CHECK(lower_bound(p, 9) / lower_bound(p, 3) ==
          doctest::Approx(std::log(9.0) / std::log(3.0)).epsilon(1e-12));

    // all gaps zero: empty sum
    Instance flat = inst;
    flat.means = {0.5, 0.5};
    CHECK(lower_bound(compute_gaps(flat), 100) == 0.0);
}

TEST_CASE("q2 degenerate case") {
    Instance inst;
    inst.num_arms = 1;
    inst.num_agents = 1;
    inst.horizon = 10;
    inst.means = {0.5};
    inst.local_sets = {{0}};
    inst.inter_round_gaps = {1};
    inst.delay_matrix = {{0}};
    CHECK(q2_term(compute_gaps(inst), 3.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("regret bounds match term-by-term recomputation") {
    SplitMix rng(4242);
    for (int it = 0; it < 50; ++it) {
        Instance inst = random_instance(rng, 8, 5, it % 2 == 0 ? 0 : 500);
        GapProfile p = compute_gaps(inst);
        auto delays = inbound_delays(inst);
        double alpha = 2.1 + rng.next_unit() * 2.0;
        CHECK(close_rel(coucb_regret_bound(p, inst.horizon, alpha, delays),
                        oracle_regret_bound(inst, inst.horizon, alpha, delays, 6.0, 2.0)));
        CHECK(close_rel(coaae_regret_bound(p, inst.horizon, alpha, delays),
                        oracle_regret_bound(inst, inst.horizon, alpha, delays, 24.0, 8.0)));
        CHECK(close_rel(q2_term(p, alpha), oracle_q2(inst, alpha)));
        CommBounds cb = comm_bounds(p, inst.horizon, alpha, delays);
        CHECK(close_rel(cb.coucb, static_cast<double>(inst.num_agents) * p.theta_total *
                                      static_cast<double>(inst.horizon)));
        CHECK(close_rel(cb.coaae, oracle_coaae_comm(inst, inst.horizon, alpha, delays)));
    }
}

TEST_CASE("zero delays drop the delay terms") {
    SplitMix rng(808);
    Instance inst = random_instance(rng, 6, 4, 0);
    GapProfile p = compute_gaps(inst);
    std::vector<std::int64_t> zero(static_cast<std::size_t>(inst.num_agents), 0);
    double log_t = std::log(static_cast<double>(inst.horizon));
    double expected = 0.0;
    for (Arm i = 0; i < inst.num_arms; ++i) {
        double g = p.tilde_gap[static_cast<std::size_t>(i)];
        if (g > 0.0) expected += 6.0 * 2.5 * log_t / g + 1.0;
    }
    expected += q2_term(p, 2.5);
    CHECK(close_rel(coucb_regret_bound(p, inst.horizon, 2.5, zero), expected));
}

TEST_CASE("aae bound dominates ucb bound and both dominate the lower bound") {
    SplitMix rng(31337);
    for (int it = 0; it < 60; ++it) {
        Instance inst = random_instance(rng, 7, 5, 0);
        if (inst.horizon < 100) inst.horizon = 100;
        GapProfile p = compute_gaps(inst);
        auto delays = inbound_delays(inst);
        double ucb = coucb_regret_bound(p, inst.horizon, 2.5, delays);
        double aae = coaae_regret_bound(p, inst.horizon, 2.5, delays);
        CHECK(aae >= ucb);
        bool boundary = false;
        for (Arm i = 0; i < inst.num_arms; ++i) {
            double g = p.tilde_gap[static_cast<std::size_t>(i)];
            double mu = inst.means[static_cast<std::size_t>(i)];
            if (g > 0.0 && (mu <= 0.0 || mu + g >= 1.0)) boundary = true;
        }
        if (!boundary) {
            double lb = lower_bound(p, inst.horizon);
            CHECK(lb <= ucb + 1e-9);
            CHECK(lb <= aae + 1e-9);
        }
    }
}

TEST_CASE("non-cooperative per-agent decomposition dominates the shared one") {
    SplitMix rng(5150);
    for (int it = 0; it < 200; ++it) {
        Instance inst = random_instance(rng);
        GapProfile p = compute_gaps(inst);
        double independent = 0.0, shared = 0.0;
        for (Arm i = 0; i < inst.num_arms; ++i) {
            for (Agent j : p.suboptimal_for[static_cast<std::size_t>(i)]) {
                Arm star = p.local_best[static_cast<std::size_t>(j)];
                independent += 1.0 / p.pair_gap[static_cast<std::size_t>(star)]
                                                [static_cast<std::size_t>(i)];
            }
            if (p.tilde_gap[static_cast<std::size_t>(i)] > 0.0)
                shared += 1.0 / p.tilde_gap[static_cast<std::size_t>(i)];
        }
        CHECK(independent >= shared - 1e-9);
    }
}

TEST_CASE("q1 equals its triple-sum definition") {
    SplitMix rng(616);
    for (int it = 0; it < 10; ++it) {
        Instance inst = random_instance(rng, 5, 4, 0);
        inst.horizon = std::min<Round>(inst.horizon, 2000);
        double alpha = 2.3 + rng.next_unit();
        GapProfile p = compute_gaps(inst);
        for (DeltaSchedule sched :
             {DeltaSchedule::inverse_round(), DeltaSchedule::fixed(0.05)}) {
            double direct = 0.0;
            for (Agent j = 0; j < inst.num_agents; ++j) {
                auto gap = inst.inter_round_gaps[static_cast<std::size_t>(j)];
                for (std::int64_t l = 1; l <= inst.num_decisions(j); ++l)
                    for (Arm i : inst.local_sets[static_cast<std::size_t>(j)])
                        direct += static_cast<double>(l) *
                                  p.theta_arm[static_cast<std::size_t>(i)] *
                                  static_cast<double>(gap) *
                                  std::pow(sched.at(l * gap), alpha);
            }
            direct *= 2.0;
            CHECK(close_rel(q1_raw(inst, sched, alpha), direct));
        }
    }
}

TEST_CASE("inbound delay is the worst sender delay") {
    Instance inst;
    inst.num_arms = 1;
    inst.num_agents = 3;
    inst.horizon = 10;
    inst.means = {0.5};
    inst.local_sets = {{0}, {0}, {0}};
    inst.inter_round_gaps = {1, 1, 1};
    inst.delay_matrix = {{0, 5, 2}, {7, 0, 1}, {3, 4, 0}};
    auto d = inbound_delays(inst);
    CHECK(d == std::vector<std::int64_t>{7, 5, 2});

    Instance solo;
    solo.num_arms = 1;
    solo.num_agents = 1;
    solo.horizon = 10;
    solo.means = {0.5};
    solo.local_sets = {{0}};
    solo.inter_round_gaps = {1};
    solo.delay_matrix = {{0}};
    CHECK(inbound_delays(solo) == std::vector<std::int64_t>{0});
}

TEST_CASE("scripted pull log regret") {
    Instance inst;
    inst.num_arms = 2;
    inst.num_agents = 1;
    inst.horizon = 6;
    inst.means = {1.0, 0.4};
    inst.local_sets = {{0, 1}};
    inst.inter_round_gaps = {1};
    inst.delay_matrix = {{0}};

    TrialTrace trace;
    trace.num_arms = 2;
    trace.num_agents = 1;
    trace.horizon = 6;
    trace.stride = 2;
    trace.pulls.resize(1);
    trace.local_pulls = {{4, 2}};
    // always the optimal deterministic arm except two pulls of arm 1
    for (Round t = 1; t <= 6; ++t) {
        PullRecord rec;
        rec.round = t;
        rec.arm = (t == 3 || t == 5) ? 1 : 0;
        rec.reward = rec.arm == 0 ? 1 : 0;
        trace.pulls[0].push_back(rec);
    }
    RegretSeries series = empirical_regret(trace, inst, 2);
    REQUIRE(series.rounds == std::vector<Round>{2, 4, 6});
    // realized: optimal-mean*decisions - rewards
    CHECK(series.realized[0] == doctest::Approx(0.0));
    CHECK(series.realized[1] == doctest::Approx(1.0));
    CHECK(series.realized[2] == doctest::Approx(2.0));
    // pseudo: pulls of arm 1 weighted by gap 0.6
    CHECK(series.pseudo[2] == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(series.pseudo_at_horizon == doctest::Approx(1.2).epsilon(1e-12));

    // all-optimal log on a deterministic arm: zero realized regret
    TrialTrace perfect = trace;
    for (auto& rec : perfect.pulls[0]) {
        rec.arm = 0;
        rec.reward = 1;
    }
    perfect.local_pulls = {{6, 0}};
    CHECK(empirical_regret(perfect, inst, 2).realized_at_horizon == doctest::Approx(0.0));

    TrialTrace mismatched = trace;
    mismatched.num_agents = 2;
    CHECK_THROWS_AS(empirical_regret(mismatched, inst, 2), std::invalid_argument);
}

TEST_CASE("realized regret agrees with pseudo regret in expectation") {
    Instance inst;
    inst.num_arms = 2;
    inst.num_agents = 1;
    inst.horizon = 200;
    inst.means = {0.7, 0.4};
    inst.local_sets = {{0, 1}};
    inst.inter_round_gaps = {1};
    inst.delay_matrix = {{0}};

    SimOptions opts;
    opts.stride = 200;
    const int seeds = 1000;
    double realized_sum = 0.0, pseudo_sum = 0.0, realized_sq = 0.0;
    for (int s = 0; s < seeds; ++s) {
        TrialTrace trace = simulate(inst, Algorithm::IndUcb, static_cast<std::uint64_t>(s), opts);
        RegretSeries series = empirical_regret(trace, inst, 200);
        realized_sum += series.realized_at_horizon;
        realized_sq += series.realized_at_horizon * series.realized_at_horizon;
        pseudo_sum += series.pseudo_at_horizon;
    }
    double mean_r = realized_sum / seeds;
    double mean_p = pseudo_sum / seeds;
    double var = realized_sq / seeds - mean_r * mean_r;
    double se = std::sqrt(var / seeds);
    CHECK(std::abs(mean_r - mean_p) <= 3.0 * se);
}

TEST_CASE("bound report lists every arm") {
    SplitMix rng(99);
    Instance inst = random_instance(rng, 5, 3, 10);
    GapProfile p = compute_gaps(inst);
    std::string report = bound_report_text(p, inst.horizon, 2.5, inbound_delays(inst));
    CHECK(report.find("q2 ") != std::string::npos);
    CHECK(report.find("total coaae_comm ") != std::string::npos);
    std::size_t lines = 0;
    for (char c : report)
        if (c == '\n') ++lines;
    CHECK(lines >= static_cast<std::size_t>(inst.num_arms) + 9);
}
