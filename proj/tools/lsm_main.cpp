// Command-line surface for the LSM engine: generate, train, retrain,
// predict, evaluate, benchmark. Exit codes: 0 success, 1 usage error,
// 2 data/format error, 3 numeric failure.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lsm/persistence.hpp"
#include "lsm/pipeline.hpp"
#include "lsm/tasks.hpp"

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct CommonTrainFlags {
    std::optional<double> lambda;
    std::string mode = "spike_trace";
    double trace_decay = 0.9;
    std::size_t washout = 0;
    bool keep_cache = false;

    lsm::TrainOptions to_options() const {
        lsm::TrainOptions options;
        options.lambda = lambda;
        options.mode.variant = lsm::feature_variant_from_string(mode);
        options.mode.trace_decay = trace_decay;
        options.keep_cache = keep_cache;
        options.washout = washout;
        return options;
    }
};

std::size_t parse_task_delay(const std::string& task) {
    const std::string prefix = "delay:";
    if (task.rfind(prefix, 0) == 0) {
        const std::string num = task.substr(prefix.size());
        std::size_t d = 0;
        const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), d);
        if (ec == std::errc() && ptr == num.data() + num.size()) return d;
    }
    throw CLI::ValidationError("--task", "expected delay:<d>, got '" + task + "'");
}

int run(CLI::App& app, int argc, char** argv) {
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate and save an untrained reservoir");
    std::string gen_config, gen_out;
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--config", gen_config, "Reservoir config JSON")->required();
    gen->add_option("--seed", gen_seed, "Override the config's seed");
    gen->add_option("--out", gen_out, "Output model file")->required();

    // train
    auto* train = app.add_subcommand("train", "Train a readout on an input/target pair");
    std::string train_config, train_model, train_inputs, train_targets, train_out;
    CommonTrainFlags train_flags;
    auto* source = train->add_option_group("source", "Reservoir source");
    source->add_option("--config", train_config, "Reservoir config JSON");
    source->add_option("--model", train_model, "Existing model file (reservoir reused)");
    source->require_option(1);
    train->add_option("--inputs", train_inputs, "Input CSV, one step per row")->required();
    train->add_option("--targets", train_targets, "Target CSV, one step per row")->required();
    train->add_option("--lambda", train_flags.lambda, "Ridge regularization strength");
    train->add_option("--mode", train_flags.mode, "Feature mode: membrane|spike_trace|both")
        ->default_val("spike_trace");
    train->add_option("--trace-decay", train_flags.trace_decay, "Spike trace decay")
        ->default_val(0.9);
    train->add_option("--washout", train_flags.washout, "Feature rows dropped at sequence start")
        ->default_val(0);
    train->add_flag("--keep-cache", train_flags.keep_cache,
                    "Retain the state cache for later retraining");
    train->add_option("--out", train_out, "Output model file")->required();

    // retrain
    auto* retrain = app.add_subcommand("retrain", "Refit the readout from a cached model");
    std::string retrain_model, retrain_targets, retrain_out;
    std::optional<double> retrain_lambda;
    retrain->add_option("--model", retrain_model, "Model file with a state cache")->required();
    retrain->add_option("--targets", retrain_targets, "New target CSV")->required();
    retrain->add_option("--lambda", retrain_lambda, "Override the stored lambda");
    retrain->add_option("--out", retrain_out, "Output model file")->required();

    // predict
    auto* predict = app.add_subcommand("predict", "Predict outputs for an input CSV");
    std::string predict_model, predict_inputs, predict_out;
    predict->add_option("--model", predict_model, "Trained model file")->required();
    predict->add_option("--inputs", predict_inputs, "Input CSV")->required();
    predict->add_option("--out", predict_out, "Prediction CSV")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "Print nmse of predictions against targets");
    std::string eval_model, eval_inputs, eval_targets;
    eval->add_option("--model", eval_model, "Trained model file")->required();
    eval->add_option("--inputs", eval_inputs, "Input CSV")->required();
    eval->add_option("--targets", eval_targets, "Target CSV")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "Run the delayed-recall benchmark");
    std::string bench_config, bench_task = "delay:3", bench_csv;
    lsm::BenchOptions bench_options;
    bench->add_option("--config", bench_config,
                      "Reservoir config JSON (built-in default when omitted)");
    bench->add_option("--task", bench_task, "Task, delay:<d>")->default_val("delay:3");
    bench->add_option("--seeds", bench_options.seeds, "Number of seeds to average over")
        ->default_val(10);
    bench->add_option("--seed", bench_options.base_seed, "Base seed")->default_val(0);
    bench->add_option("--t-train", bench_options.t_train, "Training steps")->default_val(2000);
    bench->add_option("--t-test", bench_options.t_test, "Test steps")->default_val(500);
    bench->add_option("--lambda", bench_options.lambda, "Ridge regularization strength")
        ->default_val(1.0);
    bench->add_option("--csv", bench_csv, "Also write the report as CSV to this file");

    app.parse(argc, argv);

    if (gen->parsed()) {
        lsm::ReservoirConfig config = lsm::load_config(gen_config);
        if (gen_seed.has_value()) config.seed = *gen_seed;
        lsm::LsmModel model;
        model.reservoir = lsm::generate_reservoir(config);
        lsm::save_model(model, gen_out);
    } else if (train->parsed()) {
        lsm::Reservoir reservoir = train_model.empty()
                                       ? lsm::generate_reservoir(lsm::load_config(train_config))
                                       : lsm::load_model(train_model).reservoir;
        const lsm::Matrix xs = lsm::import_csv(train_inputs);
        const lsm::Matrix ys = lsm::import_csv(train_targets);
        const lsm::LsmModel model = lsm::train_with_reservoir(
            std::move(reservoir), {{xs, ys}}, train_flags.to_options());
        lsm::save_model(model, train_out);
    } else if (retrain->parsed()) {
        const lsm::LsmModel model = lsm::load_model(retrain_model);
        const lsm::Matrix ys = lsm::import_csv(retrain_targets);
        lsm::save_model(lsm::retrain(model, ys, retrain_lambda), retrain_out);
    } else if (predict->parsed()) {
        const lsm::LsmModel model = lsm::load_model(predict_model);
        const lsm::Matrix xs = lsm::import_csv(predict_inputs);
        lsm::export_csv(lsm::predict_sequence(model, xs), predict_out);
    } else if (eval->parsed()) {
        const lsm::LsmModel model = lsm::load_model(eval_model);
        const lsm::Matrix xs = lsm::import_csv(eval_inputs);
        const lsm::Matrix ys = lsm::import_csv(eval_targets);
        std::printf("nmse=%s\n", fmt(lsm::nmse(lsm::predict_sequence(model, xs), ys)).c_str());
    } else if (bench->parsed()) {
        const lsm::ReservoirConfig config = bench_config.empty()
                                                ? lsm::default_benchmark_config()
                                                : lsm::load_config(bench_config);
        bench_options.delay = parse_task_delay(bench_task);
        const lsm::BenchReport report = lsm::run_benchmark(config, bench_options);
        std::fputs(report.to_text().c_str(), stdout);
        if (!bench_csv.empty()) {
            std::ofstream out(bench_csv, std::ios::trunc);
            if (!out) throw lsm::IoError("cannot open file for writing: " + bench_csv);
            out << report.to_csv();
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lsm -- liquid state machine engine"};
    try {
        return run(app, argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const lsm::NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const lsm::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
