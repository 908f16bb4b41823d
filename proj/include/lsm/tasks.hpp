#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsm/matrix.hpp"
#include "lsm/pipeline.hpp"

namespace lsm {

/// Delayed-recall task: xs[t] i.i.d. uniform on [0, 1); ys[t] = xs[t - d]
/// for t >= d and 0 before that. Both are T x 1.
struct DelayTask {
    Matrix xs;
    Matrix ys;
};

DelayTask gen_delay_task(std::size_t t_steps, std::size_t delay, std::uint64_t seed);

/// Mean squared error divided by the population variance of the target,
/// pooled over all entries. Throws NumericError on a constant target.
double nmse(const Matrix& pred, const Matrix& target);

/// Reservoir operating point used by the benchmark harness when no config
/// is supplied: N=200, K=5, f_inh=0.33, g=1.3/sqrt(K), g_in=3, theta=1,
/// alpha=0.35, single input and output. Chosen empirically for delayed
/// recall; see the README for the measured behaviour.
ReservoirConfig default_benchmark_config(std::uint64_t seed = 0);

struct CapacityPoint {
    std::size_t delay;
    double score;  // 1 - nmse, clamped to [0, 1]
};

struct CapacityOptions {
    FeatureMode mode{FeatureVariant::both, 0.75};
    double lambda = 1.0;
    double train_fraction = 0.7;  // leading share of the trace used for fitting
};

/// Runs the reservoir once over a T-step random input, then scores delays
/// 0..d_max by retraining the readout from the cached trace with shifted
/// targets -- one inference pass, d_max+1 readouts. Scores come from the
/// held-out tail of the same trace.
std::vector<CapacityPoint> memory_capacity_profile(const ReservoirConfig& config,
                                                   const CapacityOptions& options,
                                                   std::size_t d_max, std::size_t t_steps,
                                                   std::uint64_t seed);

struct BenchOptions {
    std::size_t delay = 3;
    std::size_t t_train = 2000;
    std::size_t t_test = 500;
    std::size_t seeds = 10;
    std::uint64_t base_seed = 0;
    double lambda = 1.0;
    FeatureMode mode{FeatureVariant::both, 0.75};
    bool measure_throughput = true;
};

/// Benchmark result. nmse/baseline_nmse/spikes_per_step are deterministic
/// for a fixed seed; the throughput figures are wall-clock measurements.
struct BenchReport {
    std::string task;
    std::size_t seeds = 0;
    double nmse_value = 0.0;
    double baseline_nmse = 0.0;   // memoryless ridge on the raw current input
    double spikes_per_step = 0.0;
    double steps_per_second = 0.0;
    double dense_steps_per_second = 0.0;
    double sparse_dense_speedup = 0.0;

    /// Line-oriented key=value rendering.
    std::string to_text() const;
    /// Single CSV row with a header line.
    std::string to_csv() const;
};

/// Trains on the delay task and evaluates on held-out data, averaging the
/// metrics over `options.seeds` independent seeds. When measure_throughput
/// is set, also times the sparse step kernel against the dense reference.
BenchReport run_benchmark(const ReservoirConfig& config, const BenchOptions& options);

/// Mean spikes per step over `xs`, starting from a zero state.
double mean_spikes_per_step(const Reservoir& res, const Matrix& xs);

}  // namespace lsm
