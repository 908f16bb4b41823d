#include "lsm/tasks.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <string>

#include "lsm/rng.hpp"

namespace lsm {

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Runs the reservoir over `xs` from a zero state, returning the feature
/// trace and the mean spike count per step.
std::pair<StateTrace, double> run_counting_spikes(const Reservoir& res, const Matrix& xs,
                                                  const FeatureMode& mode) {
    ReservoirState state = zero_state(res.config.n_neurons);
    std::vector<double> trace_state(res.config.n_neurons, 0.0);
    StateTrace trace(xs.rows, feature_width(mode, res.config.n_neurons));
    std::uint64_t spikes = 0;
    for (std::size_t t = 0; t < xs.rows; ++t) {
        reservoir_step(res, state, xs.row(t));
        for (std::uint8_t s : state.spikes) spikes += s;
        extract_features(state, trace_state, mode, trace.row(t));
    }
    return {std::move(trace), static_cast<double>(spikes) / static_cast<double>(xs.rows)};
}

/// Steps/second of `step_fn` over cycled rows of `xs`, wall-clock.
template <typename StepFn>
double measure_steps_per_second(StepFn&& step_fn, const Matrix& xs) {
    using clock = std::chrono::steady_clock;
    // Warm-up to populate caches and reach a typical activity level.
    for (std::size_t t = 0; t < 32; ++t) step_fn(xs.row(t % xs.rows));
    constexpr double kMinSeconds = 0.25;
    std::size_t steps = 0;
    std::size_t row = 0;
    const auto start = clock::now();
    double elapsed = 0.0;
    do {
        for (int k = 0; k < 64; ++k) {
            step_fn(xs.row(row));
            row = (row + 1) % xs.rows;
        }
        steps += 64;
        elapsed = std::chrono::duration<double>(clock::now() - start).count();
    } while (elapsed < kMinSeconds);
    return static_cast<double>(steps) / elapsed;
}

}  // namespace

DelayTask gen_delay_task(std::size_t t_steps, std::size_t delay, std::uint64_t seed) {
    if (t_steps == 0) throw ConfigError("t_steps: must be > 0");
    if (delay >= t_steps) {
        throw ConfigError("delay: must be < t_steps, got " + std::to_string(delay) + " with " +
                          std::to_string(t_steps) + " steps");
    }
    SeededRng rng(seed);
    DelayTask task{Matrix(t_steps, 1), Matrix(t_steps, 1)};
    for (std::size_t t = 0; t < t_steps; ++t) task.xs(t, 0) = rng.uniform(0.0, 1.0);
    for (std::size_t t = delay; t < t_steps; ++t) task.ys(t, 0) = task.xs(t - delay, 0);
    return task;
}

double nmse(const Matrix& pred, const Matrix& target) {
    if (pred.rows != target.rows || pred.cols != target.cols) {
        throw ShapeError("nmse: expected " + std::to_string(target.rows) + "x" +
                         std::to_string(target.cols) + " predictions, got " +
                         std::to_string(pred.rows) + "x" + std::to_string(pred.cols));
    }
    if (target.data.empty()) throw ShapeError("nmse: empty target");
    const double n = static_cast<double>(target.data.size());
    double mean = 0.0;
    for (double y : target.data) mean += y;
    mean /= n;
    double variance = 0.0;
    for (double y : target.data) variance += (y - mean) * (y - mean);
    variance /= n;
    if (variance <= 0.0) throw NumericError("nmse: target variance is zero (constant target)");
    double mse = 0.0;
    for (std::size_t i = 0; i < target.data.size(); ++i) {
        const double e = pred.data[i] - target.data[i];
        mse += e * e;
    }
    mse /= n;
    return mse / variance;
}

ReservoirConfig default_benchmark_config(std::uint64_t seed) {
    ReservoirConfig config;
    config.n_neurons = 200;
    config.n_inputs = 1;
    config.n_outputs = 1;
    config.fan_in = 5;
    config.input_fan_in = 1;
    config.inhibitory_fraction = 0.33;
    config.synaptic_scale = 1.3 / std::sqrt(5.0);
    config.input_scale = 3.0;
    config.neuron.threshold = 1.0;
    config.neuron.leak = 0.35;
    config.neuron.refractory_steps = 0;
    config.seed = seed;
    return config;
}

std::vector<CapacityPoint> memory_capacity_profile(const ReservoirConfig& config,
                                                   const CapacityOptions& options,
                                                   std::size_t d_max, std::size_t t_steps,
                                                   std::uint64_t seed) {
    if (config.n_inputs != 1 || config.n_outputs != 1) {
        throw ConfigError("n_inputs/n_outputs: the capacity profile needs a 1-in 1-out config");
    }
    if (d_max >= t_steps / 2) {
        throw ConfigError("d_max: must be < t_steps/2, got " + std::to_string(d_max) + " with " +
                          std::to_string(t_steps) + " steps");
    }
    if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
        throw ConfigError("train_fraction: must be in (0, 1)");
    }

    const Reservoir res = generate_reservoir(config);
    SeededRng rng(derive_seed(seed, 1));
    Matrix xs(t_steps, 1);
    for (std::size_t t = 0; t < t_steps; ++t) xs(t, 0) = rng.uniform(0.0, 1.0);

    // One inference pass; every delay below reuses this trace.
    ReservoirState state = zero_state(config.n_neurons);
    std::vector<double> trace_state(config.n_neurons, 0.0);
    const StateTrace trace = run_sequence(res, state, trace_state, xs, options.mode);

    const auto t_train =
        static_cast<std::size_t>(static_cast<double>(t_steps) * options.train_fraction);
    const std::size_t t_test = t_steps - t_train;
    if (t_train <= d_max || t_test <= d_max) {
        throw ConfigError("t_steps: too short for the requested d_max and train_fraction");
    }

    StateCache cache;
    cache.features = Matrix(t_train, trace.cols);
    std::copy(trace.data.begin(), trace.data.begin() + t_train * trace.cols,
              cache.features.data.begin());
    cache.targets = Matrix(t_train, 1);
    cache.boundaries = {0, t_train};
    Matrix test_features(t_test, trace.cols);
    std::copy(trace.data.begin() + t_train * trace.cols, trace.data.end(),
              test_features.data.begin());

    std::vector<CapacityPoint> profile;
    profile.reserve(d_max + 1);
    for (std::size_t d = 0; d <= d_max; ++d) {
        Matrix y_train(t_train, 1);
        for (std::size_t t = d; t < t_train; ++t) y_train(t, 0) = xs(t - d, 0);
        Matrix y_test(t_test, 1);
        for (std::size_t t = 0; t < t_test; ++t) y_test(t, 0) = xs(t_train + t - d, 0);

        const ReadoutModel readout =
            retrain_from_cache(cache, y_train, options.lambda, options.mode);
        const double score = 1.0 - nmse(predict(readout, test_features), y_test);
        profile.push_back({d, std::clamp(score, 0.0, 1.0)});
    }
    return profile;
}

std::string BenchReport::to_text() const {
    std::string out;
    out += "task=" + task + "\n";
    out += "seeds=" + std::to_string(seeds) + "\n";
    out += "nmse=" + fmt(nmse_value) + "\n";
    out += "baseline_nmse=" + fmt(baseline_nmse) + "\n";
    out += "spikes_per_step=" + fmt(spikes_per_step) + "\n";
    out += "steps_per_second=" + fmt(steps_per_second) + "\n";
    out += "dense_steps_per_second=" + fmt(dense_steps_per_second) + "\n";
    out += "sparse_dense_speedup=" + fmt(sparse_dense_speedup) + "\n";
    return out;
}

std::string BenchReport::to_csv() const {
    std::string out =
        "task,seeds,nmse,baseline_nmse,spikes_per_step,steps_per_second,"
        "dense_steps_per_second,sparse_dense_speedup\n";
    out += task + "," + std::to_string(seeds) + "," + fmt(nmse_value) + "," +
           fmt(baseline_nmse) + "," + fmt(spikes_per_step) + "," + fmt(steps_per_second) + "," +
           fmt(dense_steps_per_second) + "," + fmt(sparse_dense_speedup) + "\n";
    return out;
}

double mean_spikes_per_step(const Reservoir& res, const Matrix& xs) {
    if (xs.rows == 0) throw ShapeError("mean_spikes_per_step: expected at least one row, got 0");
    ReservoirState state = zero_state(res.config.n_neurons);
    std::uint64_t spikes = 0;
    for (std::size_t t = 0; t < xs.rows; ++t) {
        reservoir_step(res, state, xs.row(t));
        for (std::uint8_t s : state.spikes) spikes += s;
    }
    return static_cast<double>(spikes) / static_cast<double>(xs.rows);
}

BenchReport run_benchmark(const ReservoirConfig& config, const BenchOptions& options) {
    if (config.n_inputs != 1 || config.n_outputs != 1) {
        throw ConfigError("n_inputs/n_outputs: the delay benchmark needs a 1-in 1-out config");
    }
    if (options.seeds == 0) throw ConfigError("seeds: must be > 0");
    validate_mode(options.mode);

    BenchReport report;
    report.task = "delay:" + std::to_string(options.delay);
    report.seeds = options.seeds;

    std::optional<LsmModel> first_model;
    Matrix first_test_inputs;
    for (std::size_t i = 0; i < options.seeds; ++i) {
        const std::uint64_t seed_i = options.base_seed + i;
        ReservoirConfig cfg = config;
        cfg.seed = derive_seed(seed_i, 1);
        const DelayTask train_task =
            gen_delay_task(options.t_train, options.delay, derive_seed(seed_i, 2));
        const DelayTask test_task =
            gen_delay_task(options.t_test, options.delay, derive_seed(seed_i, 3));

        TrainOptions train_options;
        train_options.lambda = options.lambda;
        train_options.mode = options.mode;
        const LsmModel model = train(cfg, {{train_task.xs, train_task.ys}}, train_options);

        auto [trace, spikes_per_step] =
            run_counting_spikes(model.reservoir, test_task.xs, options.mode);
        report.nmse_value += nmse(predict(*model.readout, trace), test_task.ys);
        report.spikes_per_step += spikes_per_step;

        // Memoryless baseline: same ridge fit on the raw current input.
        const ReadoutModel baseline =
            fit_readout(train_task.xs, train_task.ys, options.lambda, options.mode);
        report.baseline_nmse += nmse(predict(baseline, test_task.xs), test_task.ys);

        if (i == 0) {
            first_model = model;
            first_test_inputs = test_task.xs;
        }
    }
    const double inv = 1.0 / static_cast<double>(options.seeds);
    report.nmse_value *= inv;
    report.baseline_nmse *= inv;
    report.spikes_per_step *= inv;

    if (options.measure_throughput) {
        const Reservoir& res = first_model->reservoir;
        ReservoirState sparse_state = zero_state(res.config.n_neurons);
        report.steps_per_second = measure_steps_per_second(
            [&](std::span<const double> x) { reservoir_step(res, sparse_state, x); },
            first_test_inputs);

        const DenseReference dense(res);
        ReservoirState dense_state = zero_state(res.config.n_neurons);
        report.dense_steps_per_second = measure_steps_per_second(
            [&](std::span<const double> x) { dense.step(dense_state, x); }, first_test_inputs);

        report.sparse_dense_speedup = report.steps_per_second / report.dense_steps_per_second;
    }
    return report;
}

}  // namespace lsm
