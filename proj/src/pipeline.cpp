#include "lsm/pipeline.hpp"

#include <string>

namespace lsm {

namespace {

void require_readout(const LsmModel& model, const char* op) {
    if (!model.readout.has_value()) {
        throw FormatError(std::string(op) + ": model has no trained readout");
    }
    const std::size_t width = feature_width(model.readout->mode, model.reservoir.config.n_neurons);
    if (model.readout->w_out.rows != width + 1 ||
        model.readout->w_out.cols != model.reservoir.config.n_outputs) {
        throw ShapeError(std::string(op) + ": readout dimensions inconsistent with reservoir");
    }
}

}  // namespace

LsmModel train_with_reservoir(Reservoir reservoir, const std::vector<Sequence>& sequences,
                              const TrainOptions& options) {
    validate_reservoir(reservoir);
    validate_mode(options.mode);
    if (sequences.empty()) throw ShapeError("train: expected at least one sequence, got 0");

    const std::uint32_t n = reservoir.config.n_neurons;
    const std::uint32_t m = reservoir.config.n_inputs;
    const std::uint32_t p = reservoir.config.n_outputs;

    std::vector<Matrix> feature_blocks;
    std::vector<Matrix> target_blocks;
    std::vector<std::size_t> boundaries{0};
    for (std::size_t k = 0; k < sequences.size(); ++k) {
        const auto& [xs, ys] = sequences[k];
        const std::string label = "train: sequence " + std::to_string(k);
        if (xs.cols != m) {
            throw ShapeError(label + ": expected " + std::to_string(m) + " input columns, got " +
                             std::to_string(xs.cols));
        }
        if (ys.cols != p) {
            throw ShapeError(label + ": expected " + std::to_string(p) + " target columns, got " +
                             std::to_string(ys.cols));
        }
        if (xs.rows != ys.rows) {
            throw ShapeError(label + ": inputs have " + std::to_string(xs.rows) +
                             " rows, targets have " + std::to_string(ys.rows));
        }
        if (xs.rows <= options.washout) {
            throw ShapeError(label + ": washout of " + std::to_string(options.washout) +
                             " leaves no rows from " + std::to_string(xs.rows));
        }

        // Every sequence starts from a fresh zero state: sequences are
        // independent samples, nothing carries over.
        ReservoirState state = zero_state(n);
        std::vector<double> trace_state(n, 0.0);
        StateTrace trace = run_sequence(reservoir, state, trace_state, xs, options.mode);

        const std::size_t kept = trace.rows - options.washout;
        Matrix features(kept, trace.cols);
        Matrix targets(kept, p);
        for (std::size_t t = 0; t < kept; ++t) {
            const auto src = trace.row(t + options.washout);
            std::copy(src.begin(), src.end(), features.row(t).begin());
            const auto ysrc = ys.row(t + options.washout);
            std::copy(ysrc.begin(), ysrc.end(), targets.row(t).begin());
        }
        boundaries.push_back(boundaries.back() + kept);
        feature_blocks.push_back(std::move(features));
        target_blocks.push_back(std::move(targets));
    }

    Matrix all_features = vstack(feature_blocks);
    Matrix all_targets = vstack(target_blocks);
    const double lambda = options.lambda.value_or(default_lambda(all_features));

    LsmModel model;
    model.readout = fit_readout(all_features, all_targets, lambda, options.mode);
    if (options.keep_cache) {
        model.cache = StateCache{std::move(all_features), std::move(all_targets),
                                 std::move(boundaries)};
    }
    model.reservoir = std::move(reservoir);
    return model;
}

LsmModel train(const ReservoirConfig& config, const std::vector<Sequence>& sequences,
               const TrainOptions& options) {
    return train_with_reservoir(generate_reservoir(config), sequences, options);
}

LsmModel retrain(const LsmModel& model, const Matrix& new_targets,
                 std::optional<double> lambda) {
    if (!model.cache.has_value()) {
        throw CacheMissingError(
            "retrain: model has no state cache; train with keep_cache enabled");
    }
    require_readout(model, "retrain");
    const double lam = lambda.value_or(model.readout->lambda);
    LsmModel out;
    out.reservoir = model.reservoir;
    out.readout = retrain_from_cache(*model.cache, new_targets, lam, model.readout->mode);
    out.cache = model.cache;
    return out;
}

Matrix predict_sequence(const LsmModel& model, const Matrix& xs) {
    require_readout(model, "predict");
    ReservoirState state = zero_state(model.reservoir.config.n_neurons);
    std::vector<double> trace_state(model.reservoir.config.n_neurons, 0.0);
    StateTrace trace = run_sequence(model.reservoir, state, trace_state, xs, model.readout->mode);
    return predict(*model.readout, trace);
}

StreamSession open_session(const LsmModel& model) {
    require_readout(model, "open_session");
    StreamSession session;
    session.model = &model;
    session.state = zero_state(model.reservoir.config.n_neurons);
    session.trace_state.assign(model.reservoir.config.n_neurons, 0.0);
    return session;
}

std::vector<double> stream_step(StreamSession& session, std::span<const double> x) {
    const LsmModel& model = *session.model;
    reservoir_step(model.reservoir, session.state, x);
    std::vector<double> row(feature_width(model.readout->mode, model.reservoir.config.n_neurons));
    extract_features(session.state, session.trace_state, model.readout->mode, row);
    std::vector<double> out(model.reservoir.config.n_outputs);
    predict_row(*model.readout, row, out);
    return out;
}

void reset_session(StreamSession& session) {
    session.state = zero_state(session.model->reservoir.config.n_neurons);
    session.trace_state.assign(session.model->reservoir.config.n_neurons, 0.0);
}

}  // namespace lsm
