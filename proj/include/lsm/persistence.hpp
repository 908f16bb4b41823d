#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "lsm/matrix.hpp"
#include "lsm/pipeline.hpp"

namespace lsm {

// Model files are single UTF-8 JSON documents, format tag "LSM1", with keys
// emitted in this order:
//   format, config, sign, w_rec, w_in, w_out, lambda, feature_mode, cache,
//   checksum
// w_out / lambda / feature_mode are null for an untrained reservoir; cache
// is null unless training kept it. Numbers use the shortest decimal form
// that round-trips exactly, so serialization is deterministic and lossless.
// checksum is the CRC-32 of the document serialized with checksum set to 0.
// A standalone cache file uses the same container with format tag "LSMC1".

std::string model_to_bytes(const LsmModel& model);
LsmModel model_from_bytes(std::string_view bytes);

void save_model(const LsmModel& model, const std::string& path);
LsmModel load_model(const std::string& path);

std::string cache_to_bytes(const StateCache& cache);
StateCache cache_from_bytes(std::string_view bytes);

void save_cache(const StateCache& cache, const std::string& path);
StateCache load_cache(const std::string& path);

/// Reservoir configuration as a standalone JSON file; the same object as the
/// "config" section of a model file.
ReservoirConfig load_config(const std::string& path);
void save_config(const ReservoirConfig& config, const std::string& path);

// CSV profile: no header, comma separator, '.' decimal point, '\n' line
// ends, one time step per row. Values are written in shortest round-trip
// form, so export followed by import reproduces the matrix exactly.

Matrix csv_from_string(std::string_view text);
std::string csv_to_string(const Matrix& m);

Matrix import_csv(const std::string& path);
void export_csv(const Matrix& m, const std::string& path);

namespace detail {

/// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320).
std::uint32_t crc32(std::string_view bytes);

}  // namespace detail

}  // namespace lsm
