#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cobandit/harness.hpp"

// Times the serial reference runner against the OpenMP trial loop on a
// mid-size experiment and checks that both produce the same bytes.

using namespace cobandit;

namespace {

double run_timed(const ExperimentConfig& cfg, bool parallel, ExperimentResult& result) {
    auto start = std::chrono::steady_clock::now();
    result = parallel ? run_experiment(cfg) : run_experiment_serial(cfg);
    auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

std::string result_fingerprint(const ExperimentResult& result) {
    std::string text = summary_text(result);
    for (const auto& s : result.algorithms) text += csv_text(s);
    return text;
}

} // namespace

int main(int argc, char** argv) {
    ExperimentConfig cfg;
    GenerationSpec gen;
    gen.num_arms = 20;
    gen.num_agents = 20;
    gen.local_set_size = 6;
    cfg.gen = gen;
    cfg.horizon = 30000;
    cfg.trials = 8;
    cfg.base_seed = 7;
    cfg.algorithms = {Algorithm::CoUcb, Algorithm::CoAae};
    if (argc > 1) cfg.trials = std::atoi(argv[1]);

#ifdef _OPENMP
    int max_threads = omp_get_max_threads();
#else
    int max_threads = 1;
#endif
    std::printf("trials=%lld horizon=%lld agents=%d max_threads=%d\n",
                static_cast<long long>(cfg.trials), static_cast<long long>(cfg.horizon),
                gen.num_agents, max_threads);

    ExperimentResult serial_result, parallel_result;
    double t_serial = run_timed(cfg, false, serial_result);
    std::printf("serial    %8.3f s\n", t_serial);

    double t_parallel = run_timed(cfg, true, parallel_result);
    std::printf("parallel  %8.3f s   speedup %.2fx\n", t_parallel, t_serial / t_parallel);

    if (result_fingerprint(serial_result) != result_fingerprint(parallel_result)) {
        std::printf("MISMATCH: serial and parallel runners disagree\n");
        return 1;
    }
    std::printf("serial and parallel outputs are identical\n");
    return 0;
}
