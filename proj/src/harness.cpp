#include "cobandit/harness.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cobandit/textio.hpp"

namespace cobandit {

std::uint64_t ExperimentConfig::seed_for_trial(std::int64_t trial) const {
    if (!trial_seeds.empty()) {
        if (trial < 0 || trial >= static_cast<std::int64_t>(trial_seeds.size()))
            throw std::runtime_error("trial index outside the resolved seed list");
        return trial_seeds[static_cast<std::size_t>(trial)];
    }
    return derive_seed(base_seed, 0x747269616cULL + static_cast<std::uint64_t>(trial));
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::runtime_error("config: trials must be >= 1");
    if (horizon < 1) throw std::runtime_error("config: horizon must be >= 1");
    if (algorithms.empty()) throw std::runtime_error("config: empty algorithm list");
    if (!(alpha > 2.0)) throw std::runtime_error("config: alpha must be > 2");
    if (stride < 1 || horizon % stride != 0)
        throw std::runtime_error("config: stride must divide the horizon evenly");
    if (instance_file.has_value() == gen.has_value())
        throw std::runtime_error(
            "config: exactly one of instance_file or a gen_* block is required");
    if (!trial_seeds.empty() &&
        static_cast<std::int64_t>(trial_seeds.size()) != trials)
        throw std::runtime_error("config: trial_seeds count must match trials");
}

namespace {

std::uint64_t parse_u64(const std::string& s, const std::string& context) {
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE || s[0] == '-')
        throw std::runtime_error(context + ": cannot parse '" + s +
                                 "' as an unsigned integer");
    return static_cast<std::uint64_t>(v);
}

const KvRecord& expect_values(const KvRecord& rec, std::size_t n, const std::string& origin) {
    if (rec.values.size() != n)
        throw std::runtime_error(origin + ": key '" + rec.key + "' expects " +
                                 std::to_string(n) + " value(s)");
    return rec;
}

} // namespace

ExperimentConfig config_from_text(const std::string& text, const std::string& origin) {
    KvFile kv = parse_kv_text(text, origin);
    ExperimentConfig cfg;
    cfg.algorithms.clear();
    GenerationSpec gen;
    bool saw_gen = false;

    for (const auto& rec : kv.records) {
        const std::string& k = rec.key;
        auto ctx = origin + ":" + k;
        if (k == "horizon") {
            cfg.horizon = parse_int(expect_values(rec, 1, origin).values[0], ctx);
        } else if (k == "trials") {
            cfg.trials = parse_int(expect_values(rec, 1, origin).values[0], ctx);
        } else if (k == "base_seed") {
            cfg.base_seed = parse_u64(expect_values(rec, 1, origin).values[0], ctx);
        } else if (k == "alpha") {
            cfg.alpha = parse_double(expect_values(rec, 1, origin).values[0], ctx);
        } else if (k == "stride") {
            cfg.stride = parse_int(expect_values(rec, 1, origin).values[0], ctx);
        } else if (k == "threads") {
            cfg.threads = static_cast<int>(parse_int(expect_values(rec, 1, origin).values[0], ctx));
        } else if (k == "message_log") {
            cfg.message_log = parse_int(expect_values(rec, 1, origin).values[0], ctx) != 0;
        } else if (k == "delta_schedule") {
            if (rec.values.size() == 1 && rec.values[0] == "inverse_round") {
                cfg.schedule = DeltaSchedule::inverse_round();
            } else if (rec.values.size() == 2 && rec.values[0] == "constant") {
                cfg.schedule = DeltaSchedule::fixed(parse_double(rec.values[1], ctx));
            } else {
                throw std::runtime_error(ctx + ": expected 'inverse_round' or 'constant <v>'");
            }
        } else if (k == "algos") {
            for (const auto& name : rec.values) {
                auto algo = algorithm_from_name(name);
                if (!algo) throw std::runtime_error(ctx + ": unknown algorithm '" + name + "'");
                cfg.algorithms.push_back(*algo);
            }
        } else if (k == "instance_file") {
            cfg.instance_file = expect_values(rec, 1, origin).values[0];
        } else if (k == "gen_arms") {
            gen.num_arms = static_cast<std::int32_t>(
                parse_int(expect_values(rec, 1, origin).values[0], ctx));
            saw_gen = true;
        } else if (k == "gen_agents") {
            gen.num_agents = static_cast<std::int32_t>(
                parse_int(expect_values(rec, 1, origin).values[0], ctx));
            saw_gen = true;
        } else if (k == "gen_set_size") {
            gen.local_set_size = static_cast<std::int32_t>(
                parse_int(expect_values(rec, 1, origin).values[0], ctx));
            saw_gen = true;
        } else if (k == "gen_gaps") {
            gen.gap_choices.clear();
            for (const auto& v : rec.values) gen.gap_choices.push_back(parse_int(v, ctx));
            saw_gen = true;
        } else if (k == "gen_means") {
            if (rec.values.size() == 1 && rec.values[0] == "uniform") {
                gen.mean_source = MeanSource::Uniform;
            } else if (rec.values.size() == 2 && rec.values[0] == "file") {
                gen.mean_source = MeanSource::File;
                gen.mean_file = rec.values[1];
            } else {
                throw std::runtime_error(ctx + ": expected 'uniform' or 'file <path>'");
            }
            saw_gen = true;
        } else if (k == "gen_delay") {
            if (rec.values.size() == 2 && rec.values[0] == "constant") {
                gen.delay_rule = DelayRule::Constant;
                gen.delay_constant = parse_int(rec.values[1], ctx);
            } else if (rec.values.size() == 2 && rec.values[0] == "matrix_file") {
                gen.delay_rule = DelayRule::MatrixFile;
                gen.delay_matrix_file = rec.values[1];
            } else if (rec.values.size() == 2 && rec.values[0] == "uniform") {
                gen.delay_rule = DelayRule::PerTrialUniform;
                gen.delay_uniform_avg = parse_double(rec.values[1], ctx);
            } else {
                throw std::runtime_error(
                    ctx + ": expected 'constant <c>', 'matrix_file <path>' or 'uniform <avg>'");
            }
            saw_gen = true;
        } else if (k == "trial_seeds") {
            for (const auto& v : rec.values) cfg.trial_seeds.push_back(parse_u64(v, ctx));
        } else {
            throw std::runtime_error(origin + ": unknown config key '" + k + "'");
        }
    }
    if (saw_gen) cfg.gen = gen;
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return config_from_text(read_text_file(path), path);
}

std::string config_to_text(const ExperimentConfig& config, bool resolved) {
    std::ostringstream out;
    out << "horizon " << config.horizon << "\n";
    out << "trials " << config.trials << "\n";
    out << "base_seed " << config.base_seed << "\n";
    out << "alpha " << fmt_double(config.alpha) << "\n";
    if (config.schedule.kind == DeltaSchedule::Kind::InverseRound)
        out << "delta_schedule inverse_round\n";
    else
        out << "delta_schedule constant " << fmt_double(config.schedule.constant) << "\n";
    out << "algos";
    for (auto a : config.algorithms) out << " " << algorithm_name(a);
    out << "\n";
    out << "stride " << config.stride << "\n";
    out << "message_log " << (config.message_log ? 1 : 0) << "\n";
    if (config.instance_file) out << "instance_file " << *config.instance_file << "\n";
    if (config.gen) {
        const auto& g = *config.gen;
        out << "gen_arms " << g.num_arms << "\n";
        out << "gen_agents " << g.num_agents << "\n";
        out << "gen_set_size " << g.local_set_size << "\n";
        out << "gen_gaps";
        for (auto v : g.gap_choices) out << " " << v;
        out << "\n";
        if (g.mean_source == MeanSource::Uniform)
            out << "gen_means uniform\n";
        else
            out << "gen_means file " << g.mean_file << "\n";
        switch (g.delay_rule) {
        case DelayRule::Constant:
            out << "gen_delay constant " << g.delay_constant << "\n";
            break;
        case DelayRule::MatrixFile:
            out << "gen_delay matrix_file " << g.delay_matrix_file << "\n";
            break;
        case DelayRule::PerTrialUniform:
            out << "gen_delay uniform " << fmt_double(g.delay_uniform_avg) << "\n";
            break;
        }
    }
    if (resolved) {
        out << "trial_seeds";
        for (std::int64_t k = 0; k < config.trials; ++k)
            out << " " << config.seed_for_trial(k);
        out << "\n";
    }
    return out.str();
}

Instance build_instance(const ExperimentConfig& config) {
    config.validate();
    if (config.instance_file) {
        Instance inst = instance_from_text(read_text_file(*config.instance_file),
                                           *config.instance_file);
        inst.horizon = config.horizon; // config horizon is authoritative
        inst.validate();
        return inst;
    }
    return generate_instance(*config.gen, config.horizon, config.base_seed);
}

Instance trial_instance(const ExperimentConfig& config, const Instance& base,
                        std::int64_t trial) {
    if (config.gen && config.gen->delay_rule == DelayRule::PerTrialUniform) {
        Instance inst = base;
        inst.delay_matrix = draw_delay_matrix(base.num_agents, config.gen->delay_uniform_avg,
                                              config.seed_for_trial(trial));
        inst.validate();
        return inst;
    }
    return base;
}

TrialRun run_trial(const ExperimentConfig& config, const Instance& base, std::int64_t trial,
                   const SimOptions* base_opts) {
    SimOptions opts;
    if (base_opts) opts = *base_opts;
    opts.stride = config.stride;
    opts.alpha = config.alpha;
    opts.schedule = config.schedule;
    opts.keep_message_log = opts.keep_message_log || config.message_log;

    TrialRun run;
    run.trial = trial;
    run.seed = config.seed_for_trial(trial);
    Instance inst = trial_instance(config, base, trial);
    run.traces.reserve(config.algorithms.size());
    for (Algorithm algo : config.algorithms)
        run.traces.emplace_back(algo, simulate(inst, algo, run.seed, opts));
    return run;
}

namespace {

void mean_std(const std::vector<double>& xs, double& mean, double& stdev) {
    double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    mean = sum / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    stdev = std::sqrt(ss / n);
}

ExperimentResult aggregate(const ExperimentConfig& resolved, const Instance& base,
                           std::vector<TrialRun>& runs) {
    ExperimentResult result;
    result.config = resolved;
    result.instance = base;

    auto trials = static_cast<std::size_t>(resolved.trials);
    auto points = static_cast<std::size_t>(resolved.horizon / resolved.stride);

    for (std::size_t a = 0; a < resolved.algorithms.size(); ++a) {
        AlgoSummary summary;
        summary.algo = resolved.algorithms[a];
        summary.rounds.resize(points);
        for (std::size_t k = 0; k < points; ++k)
            summary.rounds[k] = static_cast<Round>(k + 1) * resolved.stride;
        summary.regret_mean.resize(points);
        summary.regret_std.resize(points);
        summary.comm_mean.resize(points);
        summary.comm_std.resize(points);

        std::vector<double> col(trials);
        for (std::size_t k = 0; k < points; ++k) {
            for (std::size_t tr = 0; tr < trials; ++tr)
                col[tr] = runs[tr].traces[a].second.series[k].regret_realized;
            mean_std(col, summary.regret_mean[k], summary.regret_std[k]);
            for (std::size_t tr = 0; tr < trials; ++tr)
                col[tr] = static_cast<double>(runs[tr].traces[a].second.series[k].messages);
            mean_std(col, summary.comm_mean[k], summary.comm_std[k]);
        }
        summary.final_regret_mean = summary.regret_mean.back();
        summary.final_regret_std = summary.regret_std.back();
        summary.final_comm_mean = summary.comm_mean.back();

        double per_agent = 0.0, pseudo = 0.0;
        for (std::size_t tr = 0; tr < trials; ++tr) {
            const TrialTrace& trace = runs[tr].traces[a].second;
            summary.trial_final_regret.push_back(trace.series.back().regret_realized);
            summary.trial_final_pseudo.push_back(trace.series.back().regret_pseudo);
            summary.trial_final_comm.push_back(trace.messages_sent);
            summary.trial_agent_regret.push_back(trace.agent_realized);
            if (trace.confidence_violation) ++summary.trials_with_violation;
            per_agent += trace.series.back().regret_realized /
                         static_cast<double>(base.num_agents);
            pseudo += trace.series.back().regret_pseudo;
            if (resolved.message_log)
                summary.trial_message_logs.push_back(message_log_text(trace.message_log));
        }
        summary.per_agent_regret_mean = per_agent / static_cast<double>(trials);
        summary.final_pseudo_mean = pseudo / static_cast<double>(trials);
        result.algorithms.push_back(std::move(summary));
    }

    // Theoretical bounds, averaged over the per-trial instances (the delay
    // matrix is the only field that can vary).
    double lower_sum = 0.0, cr_sum = 0.0, ar_sum = 0.0, cc_sum = 0.0, ac_sum = 0.0;
    bool lower_ok = true;
    for (std::size_t tr = 0; tr < trials; ++tr) {
        Instance inst = trial_instance(resolved, base, static_cast<std::int64_t>(tr));
        GapProfile profile = compute_gaps(inst);
        auto delays = inbound_delays(inst);
        try {
            lower_sum += lower_bound(profile, inst.horizon);
        } catch (const std::domain_error&) {
            lower_ok = false;
        }
        cr_sum += coucb_regret_bound(profile, inst.horizon, resolved.alpha, delays);
        ar_sum += coaae_regret_bound(profile, inst.horizon, resolved.alpha, delays);
        CommBounds cb = comm_bounds(profile, inst.horizon, resolved.alpha, delays);
        cc_sum += cb.coucb;
        ac_sum += cb.coaae;
    }
    double n = static_cast<double>(trials);
    result.bounds.lower =
        lower_ok ? lower_sum / n : std::numeric_limits<double>::quiet_NaN();
    result.bounds.coucb_regret = cr_sum / n;
    result.bounds.coaae_regret = ar_sum / n;
    result.bounds.coucb_comm = cc_sum / n;
    result.bounds.coaae_comm = ac_sum / n;
    return result;
}

ExperimentResult run_experiment_impl(const ExperimentConfig& config, bool parallel) {
    config.validate();
    ExperimentConfig resolved = config;
    if (resolved.trial_seeds.empty())
        for (std::int64_t k = 0; k < resolved.trials; ++k)
            resolved.trial_seeds.push_back(config.seed_for_trial(k));

    Instance base = build_instance(resolved);
    SimOptions opts;
    opts.keep_pull_log = false;

    std::vector<TrialRun> runs(static_cast<std::size_t>(resolved.trials));
    std::exception_ptr error;

    if (parallel) {
#ifdef _OPENMP
        int threads = resolved.threads > 0 ? resolved.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (std::int64_t tr = 0; tr < resolved.trials; ++tr) {
            try {
                runs[static_cast<std::size_t>(tr)] = run_trial(resolved, base, tr, &opts);
            } catch (...) {
#pragma omp critical
                {
                    if (!error) error = std::current_exception();
                }
            }
        }
#else
        parallel = false;
#endif
    }
    if (!parallel) {
        for (std::int64_t tr = 0; tr < resolved.trials; ++tr)
            runs[static_cast<std::size_t>(tr)] = run_trial(resolved, base, tr, &opts);
    }
    if (error) std::rethrow_exception(error);

    return aggregate(resolved, base, runs);
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    return run_experiment_impl(config, true);
}

ExperimentResult run_experiment_serial(const ExperimentConfig& config) {
    return run_experiment_impl(config, false);
}

std::string csv_text(const AlgoSummary& summary) {
    std::ostringstream out;
    out << "round,regret_mean,regret_std,comm_mean,comm_std\n";
    for (std::size_t k = 0; k < summary.rounds.size(); ++k)
        out << summary.rounds[k] << "," << fmt_double(summary.regret_mean[k]) << ","
            << fmt_double(summary.regret_std[k]) << "," << fmt_double(summary.comm_mean[k])
            << "," << fmt_double(summary.comm_std[k]) << "\n";
    return out.str();
}

std::string summary_text(const ExperimentResult& result) {
    std::ostringstream out;
    out << "horizon " << result.config.horizon << "\n";
    out << "trials " << result.config.trials << "\n";
    out << "stride " << result.config.stride << "\n";
    out << "agents " << result.instance.num_agents << "\n";
    out << "arms " << result.instance.num_arms << "\n";
    for (const auto& s : result.algorithms) {
        out << "final " << algorithm_name(s.algo) << " regret_mean "
            << fmt_double(s.final_regret_mean) << " regret_std "
            << fmt_double(s.final_regret_std) << " comm_mean "
            << fmt_double(s.final_comm_mean) << " per_agent_regret_mean "
            << fmt_double(s.per_agent_regret_mean) << " pseudo_mean "
            << fmt_double(s.final_pseudo_mean) << " trials_with_violation "
            << s.trials_with_violation << "\n";
    }
    out << "bound lower " << fmt_double(result.bounds.lower) << "\n";
    out << "bound coucb_regret " << fmt_double(result.bounds.coucb_regret) << "\n";
    out << "bound coaae_regret " << fmt_double(result.bounds.coaae_regret) << "\n";
    out << "bound coucb_comm " << fmt_double(result.bounds.coucb_comm) << "\n";
    out << "bound coaae_comm " << fmt_double(result.bounds.coaae_comm) << "\n";
    return out.str();
}

void emit_results(const ExperimentResult& result, const std::string& directory) {
    std::filesystem::create_directories(directory);
    for (const auto& s : result.algorithms) {
        write_text_file(directory + "/" + algorithm_name(s.algo) + ".csv", csv_text(s));
        for (std::size_t tr = 0; tr < s.trial_message_logs.size(); ++tr)
            write_text_file(directory + "/" + algorithm_name(s.algo) + "_messages_trial" +
                                std::to_string(tr) + ".log",
                            s.trial_message_logs[tr]);
    }
    write_text_file(directory + "/summary.txt", summary_text(result));
    write_text_file(directory + "/instance.txt", instance_to_text(result.instance));

    ExperimentConfig emitted = result.config;
    if (emitted.instance_file) emitted.instance_file = "instance.txt";
    write_text_file(directory + "/config_resolved.txt", config_to_text(emitted, true));
}

ExperimentConfig load_replay_config(const std::string& directory) {
    ExperimentConfig cfg = load_config(directory + "/config_resolved.txt");
    if (cfg.instance_file && !cfg.instance_file->empty() &&
        (*cfg.instance_file)[0] != '/')
        cfg.instance_file = directory + "/" + *cfg.instance_file;
    return cfg;
}

std::vector<std::pair<std::string, ExperimentConfig>> preset_configs(const std::string& name) {
    auto base = [] {
        ExperimentConfig cfg;
        cfg.horizon = 30000;
        cfg.trials = 10;
        cfg.base_seed = 1;
        cfg.alpha = 2.5;
        cfg.stride = 100;
        cfg.algorithms = {Algorithm::CoUcb, Algorithm::CoAae, Algorithm::IndUcb,
                          Algorithm::IndAae};
        return cfg;
    };
    std::vector<std::pair<std::string, ExperimentConfig>> out;
    if (name == "exp1") {
        for (std::int32_t m : {5, 25, 45, 65, 85, 105}) {
            ExperimentConfig cfg = base();
            GenerationSpec gen;
            gen.num_arms = 20;
            gen.num_agents = m;
            gen.local_set_size = 6;
            cfg.gen = gen;
            out.emplace_back("M" + std::to_string(m), cfg);
        }
    } else if (name == "exp2") {
        for (std::int32_t s : {10, 30, 50, 70, 90, 100}) {
            ExperimentConfig cfg = base();
            GenerationSpec gen;
            gen.num_arms = 100;
            gen.num_agents = 10;
            gen.local_set_size = s;
            cfg.gen = gen;
            out.emplace_back("S" + std::to_string(s), cfg);
        }
    } else if (name == "exp3") {
        for (int d : {0, 1000, 3000, 5000}) {
            ExperimentConfig cfg = base();
            cfg.algorithms = {Algorithm::CoAae, Algorithm::IndAae};
            GenerationSpec gen;
            gen.num_arms = 100;
            gen.num_agents = 10;
            gen.local_set_size = 50;
            if (d == 0) {
                gen.delay_rule = DelayRule::Constant;
                gen.delay_constant = 0;
            } else {
                gen.delay_rule = DelayRule::PerTrialUniform;
                gen.delay_uniform_avg = d;
            }
            cfg.gen = gen;
            out.emplace_back("D" + std::to_string(d), cfg);
        }
    } else {
        throw std::runtime_error("unknown preset '" + name + "' (expected exp1|exp2|exp3)");
    }
    return out;
}

} // namespace cobandit
