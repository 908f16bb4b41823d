#include "lsm/reservoir.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "lsm/rng.hpp"

namespace lsm {

namespace {

std::atomic<std::uint64_t> g_step_counter{0};

void require_state(const ReservoirState& state, std::uint32_t n) {
    if (state.potentials.size() != n || state.spikes.size() != n || state.refractory.size() != n) {
        throw ShapeError("reservoir state: expected " + std::to_string(n) + " neurons, got " +
                         std::to_string(state.potentials.size()) + "/" +
                         std::to_string(state.spikes.size()) + "/" +
                         std::to_string(state.refractory.size()));
    }
}

void require_input(std::span<const double> x, std::uint32_t m) {
    if (x.size() != m) {
        throw ShapeError("input vector: expected length " + std::to_string(m) + ", got " +
                         std::to_string(x.size()));
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!std::isfinite(x[j])) {
            throw NumericError("input vector: non-finite entry at index " + std::to_string(j));
        }
    }
}

}  // namespace

void validate_config(const ReservoirConfig& c) {
    if (c.n_neurons == 0) throw ConfigError("n_neurons: must be > 0");
    if (c.n_inputs == 0) throw ConfigError("n_inputs: must be > 0");
    if (c.n_outputs == 0) throw ConfigError("n_outputs: must be > 0");
    if (c.fan_in == 0) throw ConfigError("fan_in: must be > 0");
    if (c.fan_in >= c.n_neurons) {
        throw ConfigError("fan_in: must be < n_neurons (self-connections are excluded), got " +
                          std::to_string(c.fan_in) + " with n_neurons " +
                          std::to_string(c.n_neurons));
    }
    if (c.input_fan_in > c.n_inputs) {
        throw ConfigError("input_fan_in: must be <= n_inputs, got " +
                          std::to_string(c.input_fan_in) + " with n_inputs " +
                          std::to_string(c.n_inputs));
    }
    if (!(c.inhibitory_fraction >= 0.0 && c.inhibitory_fraction <= 1.0)) {
        throw ConfigError("inhibitory_fraction: must be in [0, 1]");
    }
    if (!(c.synaptic_scale > 0.0) || !std::isfinite(c.synaptic_scale)) {
        throw ConfigError("synaptic_scale: must be finite and > 0");
    }
    if (!(c.input_scale > 0.0) || !std::isfinite(c.input_scale)) {
        throw ConfigError("input_scale: must be finite and > 0");
    }
    if (!(c.neuron.threshold > 0.0) || !std::isfinite(c.neuron.threshold)) {
        throw ConfigError("neuron.threshold: must be finite and > 0");
    }
    if (!(c.neuron.leak > 0.0 && c.neuron.leak <= 1.0)) {
        throw ConfigError("neuron.leak: must be in (0, 1]");
    }
}

ReservoirState zero_state(std::uint32_t n_neurons) {
    ReservoirState state;
    state.potentials.assign(n_neurons, 0.0);
    state.spikes.assign(n_neurons, 0);
    state.refractory.assign(n_neurons, 0);
    state.step_index = 0;
    return state;
}

Reservoir generate_reservoir(const ReservoirConfig& config) {
    validate_config(config);
    const std::uint32_t n = config.n_neurons;
    const std::uint32_t m = config.n_inputs;

    SeededRng rng(config.seed);
    Reservoir res;
    res.config = config;

    // Inhibitory signs first.
    res.sign.assign(n, +1);
    const auto n_inhibitory =
        static_cast<std::uint32_t>(std::llround(config.inhibitory_fraction * n));
    if (n_inhibitory > 0) {
        for (std::uint32_t idx : rng.sample_distinct(n, n_inhibitory)) res.sign[idx] = -1;
    }

    // Recurrent topology: exactly fan_in presynaptic neurons per row,
    // sampled without replacement, diagonal excluded.
    res.w_rec.n_rows = n;
    res.w_rec.n_cols = n;
    res.w_rec.row_offsets.assign(n + 1, 0);
    res.w_rec.col_indices.reserve(static_cast<std::size_t>(n) * config.fan_in);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t c : rng.sample_distinct(n, config.fan_in, i)) {
            res.w_rec.col_indices.push_back(c);
        }
        res.w_rec.row_offsets[i + 1] = res.w_rec.col_indices.size();
    }

    // Input weights: columns first, then values, per row. Values are uniform
    // on [-input_scale, input_scale], redrawn on an exact zero.
    res.w_in.n_rows = n;
    res.w_in.n_cols = m;
    res.w_in.row_offsets.assign(n + 1, 0);
    res.w_in.col_indices.reserve(static_cast<std::size_t>(n) * config.input_fan_in);
    res.w_in.values.reserve(static_cast<std::size_t>(n) * config.input_fan_in);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t c : rng.sample_distinct(m, config.input_fan_in)) {
            res.w_in.col_indices.push_back(c);
        }
        for (std::uint32_t k = 0; k < config.input_fan_in; ++k) {
            double v;
            do {
                v = rng.uniform(-config.input_scale, config.input_scale);
            } while (v == 0.0);
            res.w_in.values.push_back(v);
        }
        res.w_in.row_offsets[i + 1] = res.w_in.col_indices.size();
    }

    return res;
}

namespace {

void validate_csr(std::uint32_t n_rows, std::uint32_t n_cols,
                  const std::vector<std::size_t>& offsets,
                  const std::vector<std::uint32_t>& cols, const char* what) {
    if (offsets.size() != static_cast<std::size_t>(n_rows) + 1 || offsets.front() != 0 ||
        offsets.back() != cols.size()) {
        throw ShapeError(std::string(what) + ": row_offsets inconsistent with col_indices");
    }
    for (std::uint32_t i = 0; i < n_rows; ++i) {
        if (offsets[i] > offsets[i + 1]) {
            throw ShapeError(std::string(what) + ": row_offsets not monotone at row " +
                             std::to_string(i));
        }
        for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
            if (cols[k] >= n_cols) {
                throw ShapeError(std::string(what) + ": column index out of range at row " +
                                 std::to_string(i));
            }
            if (k > offsets[i] && cols[k] <= cols[k - 1]) {
                throw ShapeError(std::string(what) + ": duplicate or unsorted column in row " +
                                 std::to_string(i));
            }
        }
    }
}

}  // namespace

void validate_reservoir(const Reservoir& res) {
    validate_config(res.config);
    const std::uint32_t n = res.config.n_neurons;
    if (res.w_rec.n_rows != n || res.w_rec.n_cols != n) {
        throw ShapeError("w_rec: expected " + std::to_string(n) + "x" + std::to_string(n) +
                         ", got " + std::to_string(res.w_rec.n_rows) + "x" +
                         std::to_string(res.w_rec.n_cols));
    }
    if (res.w_in.n_rows != n || res.w_in.n_cols != res.config.n_inputs) {
        throw ShapeError("w_in: expected " + std::to_string(n) + "x" +
                         std::to_string(res.config.n_inputs) + ", got " +
                         std::to_string(res.w_in.n_rows) + "x" + std::to_string(res.w_in.n_cols));
    }
    validate_csr(res.w_rec.n_rows, res.w_rec.n_cols, res.w_rec.row_offsets, res.w_rec.col_indices,
                 "w_rec");
    validate_csr(res.w_in.n_rows, res.w_in.n_cols, res.w_in.row_offsets, res.w_in.col_indices,
                 "w_in");
    if (res.w_in.values.size() != res.w_in.col_indices.size()) {
        throw ShapeError("w_in: values length does not match col_indices");
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        if (res.w_rec.row_offsets[i + 1] - res.w_rec.row_offsets[i] != res.config.fan_in) {
            throw ShapeError("w_rec: row " + std::to_string(i) + " does not have fan_in entries");
        }
        if (res.w_in.row_offsets[i + 1] - res.w_in.row_offsets[i] != res.config.input_fan_in) {
            throw ShapeError("w_in: row " + std::to_string(i) +
                             " does not have input_fan_in entries");
        }
        for (std::size_t k = res.w_rec.row_offsets[i]; k < res.w_rec.row_offsets[i + 1]; ++k) {
            if (res.w_rec.col_indices[k] == i) {
                throw ShapeError("w_rec: self-connection at row " + std::to_string(i));
            }
        }
    }
    if (res.sign.size() != n) {
        throw ShapeError("sign: expected length " + std::to_string(n) + ", got " +
                         std::to_string(res.sign.size()));
    }
    std::uint32_t negatives = 0;
    for (std::int8_t s : res.sign) {
        if (s != 1 && s != -1) throw FormatError("sign: entries must be +1 or -1");
        if (s == -1) ++negatives;
    }
    const auto expected =
        static_cast<std::uint32_t>(std::llround(res.config.inhibitory_fraction * n));
    if (negatives != expected) {
        throw ShapeError("sign: expected " + std::to_string(expected) + " inhibitory entries, got " +
                         std::to_string(negatives));
    }
    for (double v : res.w_in.values) {
        if (!std::isfinite(v) || v == 0.0) throw NumericError("w_in: values must be finite and nonzero");
    }
}

void reservoir_step(const Reservoir& res, ReservoirState& state, std::span<const double> x) {
    const std::uint32_t n = res.config.n_neurons;
    require_state(state, n);
    require_input(x, res.config.n_inputs);

    const double g = res.config.synaptic_scale;
    const std::uint8_t* prev_spikes = state.spikes.data();
    const std::int8_t* sign = res.sign.data();
    const std::uint32_t* rec_cols = res.w_rec.col_indices.data();
    const std::size_t* rec_off = res.w_rec.row_offsets.data();
    const std::uint32_t* in_cols = res.w_in.col_indices.data();
    const std::size_t* in_off = res.w_in.row_offsets.data();
    const double* in_vals = res.w_in.values.data();

    // Phase 1: gather all drives from the previous spike vector. The spike
    // image holds 0 or sign[j], so the recurrent term is a pure index-gather
    // of small integers over each row; the only multiply by g happens once
    // per neuron, never per stored weight.
    std::vector<std::int8_t> spike_image(n);
    for (std::uint32_t j = 0; j < n; ++j) {
        spike_image[j] = prev_spikes[j] ? sign[j] : std::int8_t{0};
    }
    std::vector<double> drive(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        int acc = 0;
        for (std::size_t k = rec_off[i]; k < rec_off[i + 1]; ++k) {
            acc += spike_image[rec_cols[k]];
        }
        double d = g * static_cast<double>(acc);
        for (std::size_t k = in_off[i]; k < in_off[i + 1]; ++k) {
            d += in_vals[k] * x[in_cols[k]];
        }
        drive[i] = d;
    }

    // Phase 2: update every neuron.
    for (std::uint32_t i = 0; i < n; ++i) {
        const NeuronUpdate u =
            neuron_update(res.config.neuron, state.potentials[i], drive[i], state.refractory[i]);
        state.potentials[i] = u.potential;
        state.spikes[i] = u.spike;
        state.refractory[i] = u.refractory;
    }
    ++state.step_index;
    g_step_counter.fetch_add(1, std::memory_order_relaxed);
}

DenseReference::DenseReference(const Reservoir& res)
    : n_neurons(res.config.n_neurons),
      n_inputs(res.config.n_inputs),
      neuron(res.config.neuron),
      w_dense(res.config.n_neurons, res.config.n_neurons),
      w_in_dense(res.config.n_neurons, res.config.n_inputs) {
    const double g = res.config.synaptic_scale;
    for (std::uint32_t i = 0; i < n_neurons; ++i) {
        for (std::size_t k = res.w_rec.row_offsets[i]; k < res.w_rec.row_offsets[i + 1]; ++k) {
            const std::uint32_t j = res.w_rec.col_indices[k];
            w_dense(i, j) = g * static_cast<double>(res.sign[j]);
        }
        for (std::size_t k = res.w_in.row_offsets[i]; k < res.w_in.row_offsets[i + 1]; ++k) {
            w_in_dense(i, res.w_in.col_indices[k]) = res.w_in.values[k];
        }
    }
}

void DenseReference::step(ReservoirState& state, std::span<const double> x) const {
    require_state(state, n_neurons);
    require_input(x, n_inputs);

    // Full dense multiply-accumulate, zeros included.
    std::vector<double> drive(n_neurons);
    std::vector<double> prev(state.spikes.begin(), state.spikes.end());
    for (std::uint32_t i = 0; i < n_neurons; ++i) {
        double d = 0.0;
        const double* wrow = w_dense.row(i).data();
        for (std::uint32_t j = 0; j < n_neurons; ++j) d += wrow[j] * prev[j];
        const double* irow = w_in_dense.row(i).data();
        for (std::uint32_t j = 0; j < n_inputs; ++j) d += irow[j] * x[j];
        drive[i] = d;
    }
    for (std::uint32_t i = 0; i < n_neurons; ++i) {
        const NeuronUpdate u =
            neuron_update(neuron, state.potentials[i], drive[i], state.refractory[i]);
        state.potentials[i] = u.potential;
        state.spikes[i] = u.spike;
        state.refractory[i] = u.refractory;
    }
    ++state.step_index;
    g_step_counter.fetch_add(1, std::memory_order_relaxed);
}

void dense_reference_step(const Reservoir& res, ReservoirState& state, std::span<const double> x) {
    DenseReference(res).step(state, x);
}

std::uint64_t total_reservoir_steps() noexcept {
    return g_step_counter.load(std::memory_order_relaxed);
}

void reset_reservoir_step_counter() noexcept {
    g_step_counter.store(0, std::memory_order_relaxed);
}

}  // namespace lsm
