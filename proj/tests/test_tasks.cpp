#include <cmath>

#include "doctest.h"
#include "lsm/rng.hpp"
#include "lsm/tasks.hpp"
#include "lsm/trace.hpp"
#include "oracles.hpp"

using namespace lsm;

TEST_CASE("delay task shifts the input by d steps") {
    const DelayTask identity = gen_delay_task(10, 0, 1);
    CHECK(identity.ys == identity.xs);

    const DelayTask shifted = gen_delay_task(4, 2, 1);
    CHECK(shifted.ys(0, 0) == 0.0);
    CHECK(shifted.ys(1, 0) == 0.0);
    CHECK(shifted.ys(2, 0) == shifted.xs(0, 0));
    CHECK(shifted.ys(3, 0) == shifted.xs(1, 0));

    const DelayTask again = gen_delay_task(4, 2, 1);
    CHECK(again.xs == shifted.xs);
    CHECK(again.ys == shifted.ys);

    for (double v : shifted.xs.data) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }

    CHECK_THROWS_WITH_AS(gen_delay_task(4, 4, 1), doctest::Contains("delay"), ConfigError);
}

TEST_CASE("nmse normalizes by target variance") {
    Matrix target(5, 1);
    target.data = {1.0, 2.0, 3.0, 4.0, 5.0};

    CHECK(nmse(target, target) == 0.0);

    Matrix mean_pred(5, 1, 3.0);  // the target mean
    CHECK(nmse(mean_pred, target) == doctest::Approx(1.0).epsilon(1e-12));

    Matrix constant(5, 1, 2.0);
    CHECK_THROWS_WITH_AS(nmse(mean_pred, constant), doctest::Contains("variance"), NumericError);

    CHECK_THROWS_AS(nmse(Matrix(4, 1), target), ShapeError);
}

TEST_CASE("nmse matches an independent one-pass computation") {
    SeededRng rng(8);
    for (int round = 0; round < 10; ++round) {
        Matrix pred(20, 2), target(20, 2);
        for (auto& v : pred.data) v = rng.uniform(-2.0, 2.0);
        for (auto& v : target.data) v = rng.uniform(-2.0, 2.0);
        CHECK(nmse(pred, target) == doctest::Approx(oracle::nmse(pred, target)).epsilon(1e-10));
    }
}

TEST_CASE("quiescent reservoirs emit no spikes") {
    const Reservoir res = generate_reservoir(default_benchmark_config(3));
    CHECK(mean_spikes_per_step(res, Matrix(50, 1)) == 0.0);
}

TEST_CASE("capacity profile covers every delay and reuses the trace") {
    ReservoirConfig config = default_benchmark_config(11);
    config.n_neurons = 80;
    CapacityOptions options;
    const std::size_t d_max = 4, t_steps = 600;
    const auto profile = memory_capacity_profile(config, options, d_max, t_steps, 42);

    REQUIRE(profile.size() == d_max + 1);
    for (std::size_t d = 0; d <= d_max; ++d) {
        CHECK(profile[d].delay == d);
        CHECK(profile[d].score >= 0.0);
        CHECK(profile[d].score <= 1.0);
    }

    // White-box cross-check: a per-delay score must equal an independent
    // fit on the same trace with shifted targets.
    const Reservoir res = generate_reservoir(config);
    SeededRng rng(derive_seed(42, 1));
    Matrix xs(t_steps, 1);
    for (std::size_t t = 0; t < t_steps; ++t) xs(t, 0) = rng.uniform(0.0, 1.0);
    ReservoirState state = zero_state(config.n_neurons);
    std::vector<double> trace_state(config.n_neurons, 0.0);
    const StateTrace trace = run_sequence(res, state, trace_state, xs, options.mode);

    const auto t_train = static_cast<std::size_t>(t_steps * options.train_fraction);
    const std::size_t t_test = t_steps - t_train;
    for (std::size_t d : {std::size_t{0}, std::size_t{2}}) {
        Matrix s_train(t_train, trace.cols), s_test(t_test, trace.cols);
        std::copy(trace.data.begin(), trace.data.begin() + t_train * trace.cols,
                  s_train.data.begin());
        std::copy(trace.data.begin() + t_train * trace.cols, trace.data.end(),
                  s_test.data.begin());
        Matrix y_train(t_train, 1), y_test(t_test, 1);
        for (std::size_t t = d; t < t_train; ++t) y_train(t, 0) = xs(t - d, 0);
        for (std::size_t t = 0; t < t_test; ++t) y_test(t, 0) = xs(t_train + t - d, 0);

        const ReadoutModel fit = fit_readout(s_train, y_train, options.lambda, options.mode);
        const double score = 1.0 - nmse(predict(fit, s_test), y_test);
        CHECK(profile[d].score == std::clamp(score, 0.0, 1.0));
    }

    CHECK_THROWS_WITH_AS(memory_capacity_profile(config, options, 300, t_steps, 42),
                         doctest::Contains("d_max"), ConfigError);
}

TEST_CASE("benchmark report carries the three core metrics and is deterministic") {
    ReservoirConfig config = default_benchmark_config();
    config.n_neurons = 60;
    BenchOptions options;
    options.seeds = 2;
    options.t_train = 300;
    options.t_test = 120;
    options.measure_throughput = false;

    const BenchReport a = run_benchmark(config, options);
    const BenchReport b = run_benchmark(config, options);
    CHECK(a.nmse_value == b.nmse_value);
    CHECK(a.baseline_nmse == b.baseline_nmse);
    CHECK(a.spikes_per_step == b.spikes_per_step);
    CHECK(a.spikes_per_step > 0.0);

    const std::string text = a.to_text();
    CHECK(text.find("nmse=") != std::string::npos);
    CHECK(text.find("steps_per_second=") != std::string::npos);
    CHECK(text.find("spikes_per_step=") != std::string::npos);
    CHECK(text.find("task=delay:3") != std::string::npos);

    const std::string csv = a.to_csv();
    CHECK(csv.find("nmse") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("immediate recall scores at least 0.99 at the default operating point") {
    // Deterministic fixed-seed case; the floor was established by running
    // the benchmark itself across seeds.
    const ReservoirConfig config = default_benchmark_config(derive_seed(8000, 0));
    const auto profile = memory_capacity_profile(config, CapacityOptions{}, 1, 1500, 8000);
    CHECK(profile[0].score >= 0.99);
}

TEST_CASE("capacity fades monotonically in the delay, averaged over seeds") {
    CapacityOptions options;
    const std::size_t d_max = 6, t_steps = 1000, n_seeds = 10;
    std::vector<double> mean(d_max + 1, 0.0);
    for (std::uint64_t s = 0; s < n_seeds; ++s) {
        const auto profile = memory_capacity_profile(
            default_benchmark_config(derive_seed(300, s)), options, d_max, t_steps, 300 + s);
        for (const auto& point : profile) mean[point.delay] += point.score / n_seeds;
    }
    for (std::size_t d = 0; d + 2 <= d_max; ++d) {
        CHECK(mean[d + 2] <= mean[d] + 1e-9);
    }
    CHECK(mean[0] > 0.9);
}

TEST_CASE("the reservoir beats the memoryless baseline on delayed recall") {
    // Small, quick version of the headline comparison; the acceptance
    // suite runs the full-size one.
    BenchOptions options;
    options.seeds = 2;
    options.t_train = 800;
    options.t_test = 300;
    options.measure_throughput = false;
    const BenchReport report = run_benchmark(default_benchmark_config(), options);
    CHECK(report.nmse_value < report.baseline_nmse);
}
