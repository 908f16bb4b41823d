#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lsm/error.hpp"
#include "lsm/matrix.hpp"

namespace lsm {

/// Per-neuron dynamics parameters. The reset potential is fixed at zero.
struct NeuronParams {
    double threshold = 1.0;         // spike threshold, > 0
    double leak = 1.0;              // per-step retention of potential, in (0, 1]
    std::uint32_t refractory_steps = 0;

    bool operator==(const NeuronParams&) const = default;
};

/// Everything needed to regenerate a reservoir deterministically.
struct ReservoirConfig {
    std::uint32_t n_neurons = 0;      // N
    std::uint32_t n_inputs = 0;       // M
    std::uint32_t n_outputs = 0;      // P
    std::uint32_t fan_in = 0;         // recurrent in-edges per neuron, 0 < K < N
    std::uint32_t input_fan_in = 0;   // input in-edges per neuron, 0 <= K_in <= M
    double inhibitory_fraction = 0.0; // fraction of neurons with sign -1, in [0, 1]
    double synaptic_scale = 1.0;      // potential increment per recurrent spike, > 0
    double input_scale = 1.0;         // input weight magnitude bound, > 0
    NeuronParams neuron;
    std::uint64_t seed = 0;

    bool operator==(const ReservoirConfig&) const = default;
};

/// Throws ConfigError naming the offending field.
void validate_config(const ReservoirConfig& config);

/// CSR connectivity mask; stored entries are implicitly 1. Column indices
/// within a row are strictly ascending.
struct SparseBinaryMatrix {
    std::uint32_t n_rows = 0;
    std::uint32_t n_cols = 0;
    std::vector<std::size_t> row_offsets;   // length n_rows + 1
    std::vector<std::uint32_t> col_indices; // length row_offsets[n_rows]

    bool operator==(const SparseBinaryMatrix&) const = default;
};

/// CSR matrix with real values, same structural layout as SparseBinaryMatrix.
struct SparseRealMatrix {
    std::uint32_t n_rows = 0;
    std::uint32_t n_cols = 0;
    std::vector<std::size_t> row_offsets;
    std::vector<std::uint32_t> col_indices;
    std::vector<double> values;             // finite and nonzero

    bool operator==(const SparseRealMatrix&) const = default;
};

/// Fixed random network: immutable after generation, safe to share across
/// concurrent sessions. Row i of w_rec lists the presynaptic neurons feeding
/// neuron i; the connection weight is sign[j] for presynaptic neuron j, so
/// spike propagation needs no stored-weight multiplications.
struct Reservoir {
    ReservoirConfig config;
    SparseBinaryMatrix w_rec;   // N x N, exactly K entries per row, no diagonal
    SparseRealMatrix w_in;      // N x M, exactly K_in entries per row
    std::vector<std::int8_t> sign;  // +1 or -1 per neuron

    bool operator==(const Reservoir&) const = default;
};

/// Mutable per-session state; exclusively owned by one execution.
struct ReservoirState {
    std::vector<double> potentials;
    std::vector<std::uint8_t> spikes;
    std::vector<std::uint32_t> refractory;
    std::uint64_t step_index = 0;

    bool operator==(const ReservoirState&) const = default;
};

ReservoirState zero_state(std::uint32_t n_neurons);

/// Deterministically builds the fixed network from `config`. The draw order
/// is: inhibitory signs, then recurrent rows 0..N-1, then input rows 0..N-1
/// (columns before values). Regenerating from the same config yields an
/// identical object.
Reservoir generate_reservoir(const ReservoirConfig& config);

/// Structural invariant check; throws on violations. Used after load.
void validate_reservoir(const Reservoir& res);

struct NeuronUpdate {
    double potential;
    std::uint8_t spike;
    std::uint32_t refractory;
};

/// One discrete-time leaky integrate-and-fire update. A refractory neuron
/// ignores its drive and counts down; otherwise the candidate potential
/// leak*v + drive spikes and resets to zero when it reaches the threshold.
inline NeuronUpdate neuron_update(const NeuronParams& params, double v, double drive,
                                  std::uint32_t refractory) {
    if (!std::isfinite(drive)) throw NumericError("neuron_update: non-finite drive");
    if (refractory > 0) return {0.0, 0, refractory - 1};
    const double candidate = params.leak * v + drive;
    if (candidate >= params.threshold) return {0.0, 1, params.refractory_steps};
    return {candidate, 0, 0};
}

/// Advances `state` by one step given input vector `x` (length M).
/// Spikes computed at step t are propagated at step t+1: all drives are
/// gathered from the previous spike vector before any neuron is updated.
/// The recurrent term accumulates sign[j] over spiking presynaptic neurons
/// only; stored weights are never multiplied.
void reservoir_step(const Reservoir& res, ReservoirState& state, std::span<const double> x);

/// Dense float multiply-accumulate reference for reservoir_step. Holds the
/// explicit N x N and N x M matrices; semantics are identical.
struct DenseReference {
    explicit DenseReference(const Reservoir& res);

    void step(ReservoirState& state, std::span<const double> x) const;

    std::uint32_t n_neurons;
    std::uint32_t n_inputs;
    NeuronParams neuron;
    Matrix w_dense;     // N x N, entry (i, j) = g * sign[j] if j feeds i
    Matrix w_in_dense;  // N x M
};

/// Convenience wrapper that densifies on every call; fine for small N.
void dense_reference_step(const Reservoir& res, ReservoirState& state, std::span<const double> x);

/// Process-wide count of reservoir steps executed (sparse and dense paths).
/// Lets tests assert that retraining runs zero inference.
std::uint64_t total_reservoir_steps() noexcept;
void reset_reservoir_step_counter() noexcept;

}  // namespace lsm
