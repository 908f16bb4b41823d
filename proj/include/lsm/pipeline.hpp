#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lsm/readout.hpp"
#include "lsm/reservoir.hpp"
#include "lsm/trace.hpp"

namespace lsm {

/// Complete model: fixed reservoir, trained readout (absent for a freshly
/// generated reservoir), and the optional training-state cache.
struct LsmModel {
    Reservoir reservoir;
    std::optional<ReadoutModel> readout;
    std::optional<StateCache> cache;

    bool operator==(const LsmModel&) const = default;
};

/// One training sequence: inputs (T x M) paired with targets (T x P).
using Sequence = std::pair<Matrix, Matrix>;

struct TrainOptions {
    std::optional<double> lambda;  // default_lambda(features) when unset
    FeatureMode mode;
    bool keep_cache = false;
    std::size_t washout = 0;       // feature rows dropped at each sequence start
};

/// Generates the reservoir from `config`, runs every sequence from a fresh
/// zero state, concatenates the recorded features, and fits the readout.
LsmModel train(const ReservoirConfig& config, const std::vector<Sequence>& sequences,
               const TrainOptions& options = {});

/// Same as train but reuses an existing reservoir.
LsmModel train_with_reservoir(Reservoir reservoir, const std::vector<Sequence>& sequences,
                              const TrainOptions& options = {});

/// Fits a new readout from the model's cache; never runs the reservoir.
/// lambda defaults to the model's stored value. The cache is retained.
LsmModel retrain(const LsmModel& model, const Matrix& new_targets,
                 std::optional<double> lambda = {});

/// Fresh zero state, run the whole sequence, predict on the trace.
Matrix predict_sequence(const LsmModel& model, const Matrix& xs);

/// Stepwise inference over a shared immutable model. Each session owns its
/// state; independent sessions may run concurrently.
struct StreamSession {
    const LsmModel* model = nullptr;
    ReservoirState state;
    std::vector<double> trace_state;
};

StreamSession open_session(const LsmModel& model);

/// One reservoir step, one feature row, one readout evaluation. Streaming a
/// sequence step by step equals predict_sequence on it, bit for bit.
std::vector<double> stream_step(StreamSession& session, std::span<const double> x);

/// Zeroes potentials, spikes, refractory counters, trace, and step index.
void reset_session(StreamSession& session);

}  // namespace lsm
