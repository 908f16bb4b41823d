// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "lsm/persistence.hpp"
#include "lsm/pipeline.hpp"
#include "lsm/rng.hpp"
#include "lsm/tasks.hpp"
#include "oracles.hpp"

using namespace lsm;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

ReservoirConfig random_config(SeededRng& rng, std::uint32_t n) {
    ReservoirConfig c;
    c.n_neurons = n;
    c.n_inputs = 1 + static_cast<std::uint32_t>(rng.below(4));
    c.n_outputs = 1 + static_cast<std::uint32_t>(rng.below(3));
    c.fan_in = 1 + static_cast<std::uint32_t>(rng.below(std::min(n - 1, 8u)));
    c.input_fan_in = static_cast<std::uint32_t>(rng.below(c.n_inputs + 1));
    c.inhibitory_fraction = rng.uniform(0.0, 1.0);
    c.synaptic_scale = rng.uniform(0.05, 1.0);
    c.input_scale = rng.uniform(0.1, 2.0);
    c.neuron.threshold = 1.0;
    c.neuron.leak = rng.uniform(0.5, 1.0);
    c.neuron.refractory_steps = static_cast<std::uint32_t>(rng.below(3));
    c.seed = rng.next_u64();
    return c;
}

ReservoirState random_state(SeededRng& rng, const ReservoirConfig& c) {
    ReservoirState s = zero_state(c.n_neurons);
    for (std::uint32_t i = 0; i < c.n_neurons; ++i) {
        s.potentials[i] = rng.uniform(0.0, c.neuron.threshold * 0.999);
        s.spikes[i] = rng.below(2) ? 1 : 0;
        s.refractory[i] = static_cast<std::uint32_t>(rng.below(3));
    }
    return s;
}

// 1. reservoir_step equals dense_reference_step: spikes exactly, potentials
//    within 1e-12, for N in {8, 32, 64}, 100 random triples each, < 10 s.
Outcome oracle_equivalence() {
    Timer timer;
    for (std::uint32_t n : {8u, 32u, 64u}) {
        for (std::uint64_t k = 0; k < 100; ++k) {
            SeededRng rng(derive_seed(n, k));
            ReservoirConfig c = random_config(rng, n);
            const Reservoir res = generate_reservoir(c);
            ReservoirState sparse = random_state(rng, c);
            ReservoirState dense = sparse;
            std::vector<double> x(c.n_inputs);
            for (auto& v : x) v = rng.uniform(-1.0, 1.0);

            reservoir_step(res, sparse, x);
            dense_reference_step(res, dense, x);
            if (sparse.spikes != dense.spikes) {
                return {false, "spike mismatch at N=" + std::to_string(n) +
                                   " case " + std::to_string(k)};
            }
            for (std::uint32_t i = 0; i < n; ++i) {
                if (std::fabs(sparse.potentials[i] - dense.potentials[i]) > 1e-12) {
                    return {false, "potential mismatch at N=" + std::to_string(n)};
                }
            }
            if (sparse.refractory != dense.refractory) {
                return {false, "refractory mismatch at N=" + std::to_string(n)};
            }
        }
    }
    const double elapsed = timer.seconds();
    if (elapsed >= 10.0) return {false, "runtime " + fmt(elapsed) + " s >= 10 s"};
    return {true, "300 triples, " + fmt(elapsed) + " s"};
}

// 2. Streaming bitwise equals batch prediction: 50 random models, T=200,
//    < 30 s.
Outcome stream_batch_equality() {
    Timer timer;
    for (std::uint64_t k = 0; k < 50; ++k) {
        SeededRng rng(derive_seed(2000, k));
        ReservoirConfig c = random_config(rng, 8 + static_cast<std::uint32_t>(rng.below(57)));

        LsmModel model;
        model.reservoir = generate_reservoir(c);
        ReadoutModel readout;
        readout.mode.variant = static_cast<FeatureVariant>(rng.below(3));
        readout.mode.trace_decay = rng.uniform(0.5, 0.99);
        readout.lambda = 1e-4;
        readout.w_out = Matrix(feature_width(readout.mode, c.n_neurons) + 1, c.n_outputs);
        for (auto& v : readout.w_out.data) v = rng.uniform(-1.0, 1.0);
        model.readout = std::move(readout);

        Matrix xs(200, c.n_inputs);
        for (auto& v : xs.data) v = rng.uniform(-1.0, 1.0);

        const Matrix batch = predict_sequence(model, xs);
        StreamSession session = open_session(model);
        for (std::size_t t = 0; t < xs.rows; ++t) {
            const auto out = stream_step(session, xs.row(t));
            for (std::size_t p = 0; p < out.size(); ++p) {
                if (out[p] != batch(t, p)) {
                    return {false, "model " + std::to_string(k) + " diverges at step " +
                                       std::to_string(t)};
                }
            }
        }
    }
    const double elapsed = timer.seconds();
    if (elapsed >= 30.0) return {false, "runtime " + fmt(elapsed) + " s >= 30 s"};
    return {true, "50 models x 200 steps, " + fmt(elapsed) + " s"};
}

// 3. Retrain-without-inference: train with cache, save, reload, retrain on
//    new targets with zero reservoir steps; equals from-scratch training
//    within 1e-10 relative difference.
Outcome retrain_without_inference() {
    namespace fs = std::filesystem;
    const ReservoirConfig config = default_benchmark_config(12);
    const DelayTask original = gen_delay_task(300, 2, 900);
    const DelayTask replacement = gen_delay_task(300, 5, 901);

    TrainOptions options;
    options.lambda = 1e-4;
    options.keep_cache = true;
    const LsmModel trained = train(config, {{original.xs, original.ys}}, options);

    const fs::path path = fs::temp_directory_path() / "lsm_acceptance_model.json";
    save_model(trained, path.string());
    const LsmModel reloaded = load_model(path.string());
    fs::remove(path);

    reset_reservoir_step_counter();
    const LsmModel retrained = retrain(reloaded, replacement.ys);
    const std::uint64_t steps = total_reservoir_steps();
    if (steps != 0) return {false, "retrain executed " + std::to_string(steps) + " steps"};

    const LsmModel scratch = train(config, {{original.xs, replacement.ys}}, options);
    double max_diff = 0.0, max_ref = 0.0;
    for (std::size_t i = 0; i < scratch.readout->w_out.data.size(); ++i) {
        max_diff = std::max(max_diff, std::fabs(retrained.readout->w_out.data[i] -
                                                scratch.readout->w_out.data[i]));
        max_ref = std::max(max_ref, std::fabs(scratch.readout->w_out.data[i]));
    }
    const double relative = max_diff / std::max(1.0, max_ref);
    if (relative > 1e-10) return {false, "relative diff " + fmt(relative) + " > 1e-10"};
    return {true, "0 reservoir steps, relative diff " + fmt(relative)};
}

// 4. Delay-3 recall: LSM NMSE at most half the memoryless baseline,
//    averaged over 10 seeds, < 60 s.
Outcome temporal_memory() {
    Timer timer;
    BenchOptions options;  // delay 3, t_train 2000, t_test 500, 10 seeds
    options.measure_throughput = false;
    const BenchReport report = run_benchmark(default_benchmark_config(), options);
    const double elapsed = timer.seconds();
    const std::string detail = "lsm nmse " + fmt(report.nmse_value) + ", baseline " +
                               fmt(report.baseline_nmse) + ", " + fmt(elapsed) + " s";
    if (elapsed >= 60.0) return {false, "runtime " + fmt(elapsed) + " s >= 60 s"};
    if (!(report.nmse_value <= 0.5 * report.baseline_nmse)) return {false, detail};
    return {true, detail};
}

// 5. Binary propagation: sparse step throughput at least 5x the dense
//    reference at N=1000, K=20.
Outcome binary_propagation_speed() {
    ReservoirConfig config = default_benchmark_config(15);
    config.n_neurons = 1000;
    config.fan_in = 20;
    config.synaptic_scale = 1.3 / std::sqrt(20.0);
    BenchOptions options;
    options.seeds = 1;
    options.t_train = 300;
    options.t_test = 200;
    const BenchReport report = run_benchmark(config, options);
    const std::string detail = "sparse " + fmt(report.steps_per_second) + "/s, dense " +
                               fmt(report.dense_steps_per_second) + "/s, speedup " +
                               fmt(report.sparse_dense_speedup) + "x";
    if (!(report.sparse_dense_speedup >= 5.0)) return {false, detail};
    return {true, detail};
}

// 6. Readout solver: residual bound on 100 random instances and monotone
//    shrinkage over the lambda grid.
Outcome readout_solver() {
    const double lambdas[] = {1e-6, 1e-4, 1e-2, 1.0};
    for (std::uint64_t k = 0; k < 100; ++k) {
        SeededRng rng(derive_seed(6000, k));
        const std::size_t t_steps = 5 + rng.below(40);
        const std::size_t width = 1 + rng.below(12);
        const std::size_t outputs = 1 + rng.below(3);
        Matrix s(t_steps, width), y(t_steps, outputs);
        for (auto& v : s.data) v = rng.uniform(-2.0, 2.0);
        for (auto& v : y.data) v = rng.uniform(-2.0, 2.0);
        const double lambda = lambdas[k % 4];

        const ReadoutModel model = fit_readout(s, y, lambda);
        double rhs_max = 0.0;
        const double residual =
            oracle::normal_equations_residual(s, y, lambda, model.w_out, &rhs_max);
        if (residual > 1e-8 * (1.0 + rhs_max)) {
            return {false, "residual " + fmt(residual) + " at case " + std::to_string(k)};
        }
    }

    SeededRng rng(61);
    Matrix s(40, 8), y(40, 2);
    for (auto& v : s.data) v = rng.uniform(-1.0, 1.0);
    for (auto& v : y.data) v = rng.uniform(-1.0, 1.0);
    double previous = std::numeric_limits<double>::infinity();
    for (double lambda : lambdas) {
        double norm = 0.0;
        for (double v : fit_readout(s, y, lambda).w_out.data) norm += v * v;
        norm = std::sqrt(norm);
        if (norm > previous + 1e-12) {
            return {false, "norm grew from " + fmt(previous) + " to " + fmt(norm) +
                               " at lambda " + fmt(lambda)};
        }
        previous = norm;
    }
    return {true, "100 residual instances, shrinkage over 4 lambdas"};
}

// 7. Determinism and persistence: identical bytes for identical training,
//    bit-identical predictions after a round trip, structured errors for
//    bad files.
Outcome determinism_persistence() {
    const ReservoirConfig config = default_benchmark_config(71);
    const DelayTask task = gen_delay_task(200, 2, 71);
    TrainOptions options;
    options.lambda = 1e-4;
    options.keep_cache = true;

    const LsmModel a = train(config, {{task.xs, task.ys}}, options);
    const LsmModel b = train(config, {{task.xs, task.ys}}, options);
    const std::string bytes_a = model_to_bytes(a);
    if (bytes_a != model_to_bytes(b)) return {false, "identical training produced different bytes"};

    const LsmModel back = model_from_bytes(bytes_a);
    const DelayTask probe = gen_delay_task(100, 2, 72);
    if (predict_sequence(a, probe.xs) != predict_sequence(back, probe.xs)) {
        return {false, "round-trip changed predictions"};
    }

    bool version_ok = false, truncation_ok = false, tamper_ok = false;
    std::string versioned = bytes_a;
    versioned.replace(versioned.find("LSM1"), 4, "LSM9");
    try {
        model_from_bytes(versioned);
    } catch (const UnsupportedVersionError&) {
        version_ok = true;
    } catch (...) {
    }
    try {
        model_from_bytes(bytes_a.substr(0, bytes_a.size() / 3));
    } catch (const CorruptFileError&) {
        truncation_ok = true;
    } catch (...) {
    }
    std::string tampered = bytes_a;
    const auto digit = tampered.find("\"lambda\":");
    tampered[digit + 9] = tampered[digit + 9] == '1' ? '2' : '1';
    try {
        model_from_bytes(tampered);
    } catch (const FormatError&) {
        tamper_ok = true;  // checksum mismatch or malformed number
    } catch (...) {
    }
    if (!version_ok) return {false, "version mismatch not rejected as such"};
    if (!truncation_ok) return {false, "truncation not rejected as corruption"};
    if (!tamper_ok) return {false, "tampering not rejected"};
    return {true, "bytes stable, round-trip exact, bad files rejected"};
}

// 8. Fading memory: capacity score at delay 0 exceeds delay 8, averaged
//    over 10 seeds of the default config.
Outcome fading_memory() {
    CapacityOptions options;
    double sum_d0 = 0.0, sum_d8 = 0.0;
    const std::size_t n_seeds = 10;
    for (std::uint64_t s = 0; s < n_seeds; ++s) {
        ReservoirConfig config = default_benchmark_config(derive_seed(8000, s));
        const auto profile = memory_capacity_profile(config, options, 8, 1500, 8000 + s);
        sum_d0 += profile[0].score;
        sum_d8 += profile[8].score;
    }
    const double mean_d0 = sum_d0 / n_seeds;
    const double mean_d8 = sum_d8 / n_seeds;
    const std::string detail = "mean score d0 " + fmt(mean_d0) + ", d8 " + fmt(mean_d8);
    if (!(mean_d0 > mean_d8)) return {false, detail};
    return {true, detail};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> criteria = {
        {1, "oracle-equivalence", oracle_equivalence},
        {2, "stream-batch-equality", stream_batch_equality},
        {3, "retrain-without-inference", retrain_without_inference},
        {4, "temporal-memory", temporal_memory},
        {5, "binary-propagation-speed", binary_propagation_speed},
        {6, "readout-solver", readout_solver},
        {7, "determinism-persistence", determinism_persistence},
        {8, "fading-memory", fading_memory},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Outcome outcome{false, "unhandled exception"};
        try {
            outcome = criterion.fn();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s [%d] %s: %s\n", outcome.pass ? "PASS" : "FAIL", criterion.id,
                    criterion.name, outcome.detail.c_str());
        std::fflush(stdout);
        failures += outcome.pass ? 0 : 1;
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
