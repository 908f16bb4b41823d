#include "lsm/persistence.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace lsm {

using ordered_json = nlohmann::ordered_json;

namespace detail {

std::uint32_t crc32(std::string_view bytes) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (unsigned char ch : bytes) crc = table[(crc ^ ch) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

}  // namespace detail

namespace {

constexpr const char* kModelFormat = "LSM1";
constexpr const char* kCacheFormat = "LSMC1";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure: " + path);
    return std::move(buf).str();
}

void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failure: " + path);
}

const ordered_json& field(const ordered_json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw FormatError(std::string("missing field: ") + key);
    return *it;
}

template <typename T>
T get_as(const ordered_json& j, const char* key) {
    try {
        return field(j, key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

double finite_or_throw(double v, const char* what) {
    if (!std::isfinite(v)) throw NumericError(std::string(what) + ": non-finite value");
    return v;
}

ordered_json matrix_to_json(const Matrix& m, const char* what) {
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        ordered_json row = ordered_json::array();
        for (std::size_t c = 0; c < m.cols; ++c) {
            row.push_back(finite_or_throw(m(r, c), what));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const ordered_json& j, const char* what) {
    if (!j.is_array()) throw FormatError(std::string(what) + ": expected an array of rows");
    Matrix m;
    m.rows = j.size();
    for (std::size_t r = 0; r < m.rows; ++r) {
        const auto& row = j[r];
        if (!row.is_array()) throw FormatError(std::string(what) + ": row is not an array");
        if (r == 0) {
            m.cols = row.size();
            m.data.reserve(m.rows * m.cols);
        } else if (row.size() != m.cols) {
            throw FormatError(std::string(what) + ": ragged rows");
        }
        for (const auto& v : row) {
            if (!v.is_number()) throw FormatError(std::string(what) + ": non-numeric entry");
            const double d = v.get<double>();
            if (!std::isfinite(d)) throw FormatError(std::string(what) + ": non-finite entry");
            m.data.push_back(d);
        }
    }
    if (m.rows == 0) m.cols = 0;
    return m;
}

ordered_json config_to_json(const ReservoirConfig& c) {
    ordered_json j;
    j["n_neurons"] = c.n_neurons;
    j["n_inputs"] = c.n_inputs;
    j["n_outputs"] = c.n_outputs;
    j["fan_in"] = c.fan_in;
    j["input_fan_in"] = c.input_fan_in;
    j["inhibitory_fraction"] = c.inhibitory_fraction;
    j["synaptic_scale"] = c.synaptic_scale;
    j["input_scale"] = c.input_scale;
    j["neuron"] = {{"threshold", c.neuron.threshold},
                   {"leak", c.neuron.leak},
                   {"refractory_steps", c.neuron.refractory_steps}};
    j["seed"] = c.seed;
    return j;
}

ReservoirConfig config_from_json(const ordered_json& j) {
    if (!j.is_object()) throw FormatError("config: expected an object");
    ReservoirConfig c;
    c.n_neurons = get_as<std::uint32_t>(j, "n_neurons");
    c.n_inputs = get_as<std::uint32_t>(j, "n_inputs");
    c.n_outputs = get_as<std::uint32_t>(j, "n_outputs");
    c.fan_in = get_as<std::uint32_t>(j, "fan_in");
    c.input_fan_in = get_as<std::uint32_t>(j, "input_fan_in");
    c.inhibitory_fraction = get_as<double>(j, "inhibitory_fraction");
    c.synaptic_scale = get_as<double>(j, "synaptic_scale");
    c.input_scale = get_as<double>(j, "input_scale");
    const auto& neuron = field(j, "neuron");
    c.neuron.threshold = get_as<double>(neuron, "threshold");
    c.neuron.leak = get_as<double>(neuron, "leak");
    c.neuron.refractory_steps = get_as<std::uint32_t>(neuron, "refractory_steps");
    c.seed = get_as<std::uint64_t>(j, "seed");
    return c;
}

ordered_json mode_to_json(const FeatureMode& mode) {
    return {{"variant", to_string(mode.variant)}, {"trace_decay", mode.trace_decay}};
}

FeatureMode mode_from_json(const ordered_json& j) {
    FeatureMode mode;
    mode.variant = feature_variant_from_string(get_as<std::string>(j, "variant"));
    mode.trace_decay = get_as<double>(j, "trace_decay");
    validate_mode(mode);
    return mode;
}

ordered_json cache_to_json(const StateCache& cache) {
    ordered_json j;
    j["format"] = kCacheFormat;
    j["features"] = matrix_to_json(cache.features, "cache features");
    j["targets"] = matrix_to_json(cache.targets, "cache targets");
    j["boundaries"] = cache.boundaries;
    return j;
}

StateCache cache_from_json(const ordered_json& j) {
    const auto tag = get_as<std::string>(j, "format");
    if (tag != kCacheFormat) {
        throw UnsupportedVersionError("unsupported cache format '" + tag + "', expected " +
                                      kCacheFormat);
    }
    StateCache cache;
    cache.features = matrix_from_json(field(j, "features"), "cache features");
    cache.targets = matrix_from_json(field(j, "targets"), "cache targets");
    cache.boundaries = get_as<std::vector<std::size_t>>(j, "boundaries");
    if (cache.targets.rows != cache.features.rows) {
        throw ShapeError("cache: features have " + std::to_string(cache.features.rows) +
                         " rows, targets have " + std::to_string(cache.targets.rows));
    }
    if (cache.boundaries.empty() || cache.boundaries.front() != 0 ||
        cache.boundaries.back() != cache.features.rows) {
        throw FormatError("cache: boundaries do not partition the rows");
    }
    for (std::size_t k = 1; k < cache.boundaries.size(); ++k) {
        if (cache.boundaries[k] <= cache.boundaries[k - 1]) {
            throw FormatError("cache: boundaries not strictly increasing");
        }
    }
    return cache;
}

template <typename T>
ordered_json vector_to_json(const std::vector<T>& v) {
    ordered_json arr = ordered_json::array();
    for (const T& x : v) arr.push_back(x);
    return arr;
}

ordered_json sparse_binary_to_json(const SparseBinaryMatrix& m) {
    ordered_json j;
    j["row_offsets"] = vector_to_json(m.row_offsets);
    j["col_indices"] = vector_to_json(m.col_indices);
    return j;
}

ordered_json sparse_real_to_json(const SparseRealMatrix& m) {
    ordered_json j;
    j["row_offsets"] = vector_to_json(m.row_offsets);
    j["col_indices"] = vector_to_json(m.col_indices);
    ordered_json vals = ordered_json::array();
    for (double v : m.values) vals.push_back(finite_or_throw(v, "w_in values"));
    j["values"] = vals;
    return j;
}

/// Serializes with the checksum field set to zero, then patches it in.
std::string seal_document(ordered_json doc) {
    doc["checksum"] = 0u;
    const std::uint32_t crc = detail::crc32(doc.dump());
    doc["checksum"] = crc;
    return doc.dump();
}

ordered_json open_document(std::string_view bytes, const char* expected_format) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw CorruptFileError(std::string("truncated or corrupt document: ") + e.what());
    }
    if (!doc.is_object()) throw CorruptFileError("document is not a JSON object");
    const auto tag = get_as<std::string>(doc, "format");
    if (tag != expected_format) {
        throw UnsupportedVersionError("unsupported format '" + tag + "', expected " +
                                      expected_format);
    }
    const auto stored = get_as<std::uint32_t>(doc, "checksum");
    doc["checksum"] = 0u;
    const std::uint32_t actual = detail::crc32(doc.dump());
    if (stored != actual) {
        throw CorruptFileError("checksum mismatch: stored " + std::to_string(stored) +
                               ", computed " + std::to_string(actual));
    }
    return doc;
}

}  // namespace

std::string model_to_bytes(const LsmModel& model) {
    validate_reservoir(model.reservoir);
    ordered_json doc;
    doc["format"] = kModelFormat;
    doc["config"] = config_to_json(model.reservoir.config);
    ordered_json sign = ordered_json::array();
    for (std::int8_t s : model.reservoir.sign) sign.push_back(static_cast<int>(s));
    doc["sign"] = std::move(sign);
    doc["w_rec"] = sparse_binary_to_json(model.reservoir.w_rec);
    doc["w_in"] = sparse_real_to_json(model.reservoir.w_in);
    if (model.readout.has_value()) {
        doc["w_out"] = matrix_to_json(model.readout->w_out, "w_out");
        doc["lambda"] = finite_or_throw(model.readout->lambda, "lambda");
        doc["feature_mode"] = mode_to_json(model.readout->mode);
    } else {
        doc["w_out"] = nullptr;
        doc["lambda"] = nullptr;
        doc["feature_mode"] = nullptr;
    }
    doc["cache"] = model.cache.has_value() ? cache_to_json(*model.cache) : ordered_json(nullptr);
    return seal_document(std::move(doc));
}

LsmModel model_from_bytes(std::string_view bytes) {
    const ordered_json doc = open_document(bytes, kModelFormat);

    LsmModel model;
    model.reservoir.config = config_from_json(field(doc, "config"));
    for (const auto& s : field(doc, "sign")) {
        const int v = s.get<int>();
        if (v != 1 && v != -1) throw FormatError("sign: entries must be +1 or -1");
        model.reservoir.sign.push_back(static_cast<std::int8_t>(v));
    }
    const auto& wrec = field(doc, "w_rec");
    model.reservoir.w_rec.n_rows = model.reservoir.config.n_neurons;
    model.reservoir.w_rec.n_cols = model.reservoir.config.n_neurons;
    model.reservoir.w_rec.row_offsets = get_as<std::vector<std::size_t>>(wrec, "row_offsets");
    model.reservoir.w_rec.col_indices = get_as<std::vector<std::uint32_t>>(wrec, "col_indices");
    const auto& win = field(doc, "w_in");
    model.reservoir.w_in.n_rows = model.reservoir.config.n_neurons;
    model.reservoir.w_in.n_cols = model.reservoir.config.n_inputs;
    model.reservoir.w_in.row_offsets = get_as<std::vector<std::size_t>>(win, "row_offsets");
    model.reservoir.w_in.col_indices = get_as<std::vector<std::uint32_t>>(win, "col_indices");
    model.reservoir.w_in.values = get_as<std::vector<double>>(win, "values");
    validate_reservoir(model.reservoir);

    const auto& wout = field(doc, "w_out");
    const auto& lambda = field(doc, "lambda");
    const auto& mode = field(doc, "feature_mode");
    if (!wout.is_null()) {
        if (lambda.is_null() || mode.is_null()) {
            throw FormatError("model: w_out present but lambda or feature_mode is null");
        }
        ReadoutModel readout;
        readout.w_out = matrix_from_json(wout, "w_out");
        readout.lambda = lambda.get<double>();
        if (!(readout.lambda >= 0.0) || !std::isfinite(readout.lambda)) {
            throw FormatError("lambda: must be finite and >= 0");
        }
        readout.mode = mode_from_json(mode);
        const std::size_t width =
            feature_width(readout.mode, model.reservoir.config.n_neurons);
        if (readout.w_out.rows != width + 1 ||
            readout.w_out.cols != model.reservoir.config.n_outputs) {
            throw ShapeError("w_out: expected " + std::to_string(width + 1) + "x" +
                             std::to_string(model.reservoir.config.n_outputs) + ", got " +
                             std::to_string(readout.w_out.rows) + "x" +
                             std::to_string(readout.w_out.cols));
        }
        model.readout = std::move(readout);
    } else if (!lambda.is_null() || !mode.is_null()) {
        throw FormatError("model: lambda or feature_mode set on an untrained model");
    }

    const auto& cache = field(doc, "cache");
    if (!cache.is_null()) {
        if (!model.readout.has_value()) throw FormatError("model: cache without readout");
        StateCache parsed = cache_from_json(cache);
        const std::size_t width =
            feature_width(model.readout->mode, model.reservoir.config.n_neurons);
        if (parsed.features.cols != width ||
            parsed.targets.cols != model.reservoir.config.n_outputs) {
            throw ShapeError("cache: expected " + std::to_string(width) + " feature columns and " +
                             std::to_string(model.reservoir.config.n_outputs) +
                             " target columns, got " + std::to_string(parsed.features.cols) +
                             " and " + std::to_string(parsed.targets.cols));
        }
        model.cache = std::move(parsed);
    }
    return model;
}

void save_model(const LsmModel& model, const std::string& path) {
    write_file(path, model_to_bytes(model));
}

LsmModel load_model(const std::string& path) {
    return model_from_bytes(read_file(path));
}

std::string cache_to_bytes(const StateCache& cache) {
    return seal_document(cache_to_json(cache));
}

StateCache cache_from_bytes(std::string_view bytes) {
    return cache_from_json(open_document(bytes, kCacheFormat));
}

void save_cache(const StateCache& cache, const std::string& path) {
    write_file(path, cache_to_bytes(cache));
}

StateCache load_cache(const std::string& path) {
    return cache_from_bytes(read_file(path));
}

ReservoirConfig load_config(const std::string& path) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("config file: ") + e.what());
    }
    ReservoirConfig config = config_from_json(doc);
    validate_config(config);
    return config;
}

void save_config(const ReservoirConfig& config, const std::string& path) {
    write_file(path, config_to_json(config).dump(2) + "\n");
}

Matrix csv_from_string(std::string_view text) {
    Matrix m;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = text.substr(pos, eol - pos);
        ++line_no;

        std::vector<double> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            const std::string_view cell =
                line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                   : comma - start);
            double value = 0.0;
            const auto [ptr, ec] =
                std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
                throw ParseError("csv: line " + std::to_string(line_no) +
                                 ": not a finite number: '" + std::string(cell) + "'");
            }
            fields.push_back(value);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }

        if (m.rows == 0) {
            m.cols = fields.size();
        } else if (fields.size() != m.cols) {
            throw ParseError("csv: line " + std::to_string(line_no) + ": expected " +
                             std::to_string(m.cols) + " fields, got " +
                             std::to_string(fields.size()));
        }
        m.data.insert(m.data.end(), fields.begin(), fields.end());
        ++m.rows;
        pos = eol + 1;
    }
    if (m.rows == 0) throw ParseError("csv: line 1: empty input");
    return m;
}

std::string csv_to_string(const Matrix& m) {
    std::string out;
    out.reserve(m.rows * m.cols * 12);
    char buf[64];
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            const double v = finite_or_throw(m(r, c), "csv export");
            const auto res = std::to_chars(buf, buf + sizeof buf, v);
            out.append(buf, res.ptr);
            out.push_back(c + 1 < m.cols ? ',' : '\n');
        }
    }
    return out;
}

Matrix import_csv(const std::string& path) {
    return csv_from_string(read_file(path));
}

void export_csv(const Matrix& m, const std::string& path) {
    write_file(path, csv_to_string(m));
}

}  // namespace lsm
