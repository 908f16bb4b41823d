#pragma once

#include <span>
#include <string>
#include <vector>

#include "lsm/matrix.hpp"
#include "lsm/reservoir.hpp"

namespace lsm {

/// Which neuron quantity the readout sees.
enum class FeatureVariant { membrane, spike_trace, both };

std::string to_string(FeatureVariant v);
FeatureVariant feature_variant_from_string(const std::string& name);

/// Feature definition. spike_trace is an exponentially filtered spike train:
/// trace[i] <- decay * trace[i] + spike[i] after every step.
struct FeatureMode {
    FeatureVariant variant = FeatureVariant::spike_trace;
    double trace_decay = 0.9;  // in (0, 1)

    bool operator==(const FeatureMode&) const = default;
};

void validate_mode(const FeatureMode& mode);

/// Feature row width: N for membrane or spike_trace, 2N for both.
std::size_t feature_width(const FeatureMode& mode, std::size_t n_neurons);

/// Recorded features over time, one row per step.
using StateTrace = Matrix;

/// Updates the spike trace in place and writes the feature row for the
/// current state into `out_row` (length feature_width). For `both`, the
/// membrane half precedes the trace half.
void extract_features(const ReservoirState& state, std::span<double> trace_state,
                      const FeatureMode& mode, std::span<double> out_row);

/// Runs reservoir_step over the rows of `xs`, recording one feature row per
/// step. `state` and `trace_state` advance in place, so chaining two calls
/// is exactly equivalent to one call on the concatenated input.
StateTrace run_sequence(const Reservoir& res, ReservoirState& state,
                        std::vector<double>& trace_state, const Matrix& xs,
                        const FeatureMode& mode);

}  // namespace lsm
