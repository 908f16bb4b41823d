#include "lsm/trace.hpp"

#include <string>

namespace lsm {

std::string to_string(FeatureVariant v) {
    switch (v) {
        case FeatureVariant::membrane: return "membrane";
        case FeatureVariant::spike_trace: return "spike_trace";
        case FeatureVariant::both: return "both";
    }
    throw ConfigError("feature variant: unknown enum value");
}

FeatureVariant feature_variant_from_string(const std::string& name) {
    if (name == "membrane") return FeatureVariant::membrane;
    if (name == "spike_trace") return FeatureVariant::spike_trace;
    if (name == "both") return FeatureVariant::both;
    throw ConfigError("feature variant: expected membrane|spike_trace|both, got '" + name + "'");
}

void validate_mode(const FeatureMode& mode) {
    if (!(mode.trace_decay > 0.0 && mode.trace_decay < 1.0)) {
        throw ConfigError("trace_decay: must be in (0, 1)");
    }
}

std::size_t feature_width(const FeatureMode& mode, std::size_t n_neurons) {
    return mode.variant == FeatureVariant::both ? 2 * n_neurons : n_neurons;
}

void extract_features(const ReservoirState& state, std::span<double> trace_state,
                      const FeatureMode& mode, std::span<double> out_row) {
    const std::size_t n = state.potentials.size();
    if (trace_state.size() != n) {
        throw ShapeError("trace_state: expected length " + std::to_string(n) + ", got " +
                         std::to_string(trace_state.size()));
    }
    const std::size_t width = feature_width(mode, n);
    if (out_row.size() != width) {
        throw ShapeError("feature row: expected length " + std::to_string(width) + ", got " +
                         std::to_string(out_row.size()));
    }
    const double beta = mode.trace_decay;
    for (std::size_t i = 0; i < n; ++i) {
        trace_state[i] = beta * trace_state[i] + static_cast<double>(state.spikes[i]);
    }
    switch (mode.variant) {
        case FeatureVariant::membrane:
            for (std::size_t i = 0; i < n; ++i) out_row[i] = state.potentials[i];
            break;
        case FeatureVariant::spike_trace:
            for (std::size_t i = 0; i < n; ++i) out_row[i] = trace_state[i];
            break;
        case FeatureVariant::both:
            for (std::size_t i = 0; i < n; ++i) out_row[i] = state.potentials[i];
            for (std::size_t i = 0; i < n; ++i) out_row[n + i] = trace_state[i];
            break;
    }
}

StateTrace run_sequence(const Reservoir& res, ReservoirState& state,
                        std::vector<double>& trace_state, const Matrix& xs,
                        const FeatureMode& mode) {
    validate_mode(mode);
    if (xs.rows == 0) throw ShapeError("run_sequence: expected at least one input row, got 0");
    if (xs.cols != res.config.n_inputs) {
        throw ShapeError("run_sequence: expected " + std::to_string(res.config.n_inputs) +
                         " input columns, got " + std::to_string(xs.cols));
    }
    const std::size_t width = feature_width(mode, res.config.n_neurons);
    StateTrace trace(xs.rows, width);
    for (std::size_t t = 0; t < xs.rows; ++t) {
        reservoir_step(res, state, xs.row(t));
        extract_features(state, trace_state, mode, trace.row(t));
    }
    return trace;
}

}  // namespace lsm
