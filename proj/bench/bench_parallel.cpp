// Serial reference versus OpenMP execution on two workloads:
//   levels:     one Subset Simulation run (chains within a level in parallel)
//   replicates: a batch of runs (replicates in parallel)
// Results are checked for equality; timings are wall-clock medians.
//
//   bench_parallel [repeats]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "subsim/execution.hpp"
#include "subsim/experiments.hpp"
#include "subsim/subset_simulation.hpp"

using namespace subsim;

namespace {

double median_seconds(int repeats, const std::function<double()>& body, double& result) {
    std::vector<double> times;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        result = body();
        times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

int compare(const char* name, int repeats, const std::function<double(Execution)>& body) {
    double serial_result = 0.0, parallel_result = 0.0;
    const double ts = median_seconds(repeats, [&] { return body(Execution::serial); }, serial_result);
    const double tp = median_seconds(repeats, [&] { return body(Execution::parallel); }, parallel_result);
    const bool same = serial_result == parallel_result;
    std::printf("%-11s serial %8.3f s  parallel %8.3f s  speedup %5.2fx  results %s\n", name, ts, tp, ts / tp,
                same ? "identical" : "DIFFER");
    return same ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
    std::printf("threads available: %d\n", max_threads());

    const FailureSpec high_dim{linear_sum_model(1000), 200.0};
    SsConfig cfg;
    cfg.samples_per_level = 3000;

    int bad = 0;
    bad += compare("levels", repeats, [&](Execution exec) {
        RandomStream stream(0);
        return run_subset_simulation(high_dim, cfg, stream, exec).p_hat;
    });

    const FailureSpec low_dim{linear_sum_model(2), 9.0};
    bad += compare("replicates", repeats, [&](Execution exec) {
        return replicate_ss(low_dim, SsConfig{}, 200, 0, exec).p_hat.mean;
    });
    return bad;
}
