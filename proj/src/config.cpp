#include "simmap/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "simmap/error.hpp"
#include "simmap/mds.hpp"

namespace simmap {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
        throw ValidationError("config key '" + std::string(key) + "': invalid value '" + std::string(value) + "'");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ValidationError("config key '" + std::string(key) + "': expected true/false, got '" + std::string(value) + "'");
}

}  // namespace

std::string_view method_name(EmbedMethod m) { return m == EmbedMethod::l_isomap ? "l-isomap" : "isomap"; }

EmbedMethod parse_method(std::string_view text) {
    if (text == "isomap") return EmbedMethod::isomap;
    if (text == "l-isomap") return EmbedMethod::l_isomap;
    throw ValidationError("method must be 'isomap' or 'l-isomap', got '" + std::string(text) + "'");
}

const std::vector<std::string>& path_keys() {
    static const std::vector<std::string> keys{"profiles", "cooc",      "occurrences", "graph",  "nodes",
                                               "embedding", "labels",   "landmarks_file", "geodesic", "out"};
    return keys;
}

const std::vector<std::string>& scalar_keys() {
    static const std::vector<std::string> keys{"min_cooc", "dims",  "method", "landmark_strategy", "landmarks",
                                               "seeds",    "rng_seed", "n_cap", "threads", "timestamp"};
    return keys;
}

void PipelineConfig::set(std::string_view key, std::string_view value) {
    if (key == "min_cooc") {
        min_cooc = parse_number<std::uint32_t>(key, value);
    } else if (key == "dims") {
        dims = parse_number<std::size_t>(key, value);
    } else if (key == "method") {
        method = parse_method(value);
    } else if (key == "landmark_strategy") {
        landmark_strategy = parse_strategy(value);
    } else if (key == "landmarks") {
        landmarks = parse_number<std::size_t>(key, value);
    } else if (key == "seeds") {
        seeds = parse_number<std::size_t>(key, value);
    } else if (key == "rng_seed") {
        rng_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "n_cap") {
        n_cap = parse_number<std::size_t>(key, value);
    } else if (key == "threads") {
        threads = parse_number<unsigned>(key, value);
    } else if (key == "timestamp") {
        timestamp = parse_bool(key, value);
    } else if (std::find(path_keys().begin(), path_keys().end(), key) != path_keys().end()) {
        if (value.empty()) throw ValidationError("config key '" + std::string(key) + "' has an empty path");
        paths[std::string(key)] = std::filesystem::path(std::string(value));
    } else {
        throw ValidationError("unknown config key '" + std::string(key) + "'");
    }
}

std::filesystem::path PipelineConfig::path(std::string_view key) const {
    const auto it = paths.find(std::string(key));
    return it == paths.end() ? std::filesystem::path{} : it->second;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text, const std::string& source) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key=value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(source, line_no, "empty key");
        out.emplace_back(std::string(key), std::string(value));
    }
    return out;
}

void apply_config_file(PipelineConfig& config, const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open config file '" + file.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    for (const auto& [key, value] : parse_config_text(buffer.str(), file.string())) config.set(key, value);
}

void validate(const PipelineConfig& c, Stage stage) {
    if (c.min_cooc < 1) throw ValidationError("min_cooc must be >= 1");
    if (stage == Stage::embed) {
        if (c.dims < 1 || c.dims > max_embedding_dims) {
            throw ValidationError("dims must be in [1, " + std::to_string(max_embedding_dims) + "]");
        }
        if (c.n_cap < 1) throw ValidationError("n_cap must be >= 1");
    }
    const bool needs_landmarks = stage == Stage::landmarks || (stage == Stage::embed && c.method == EmbedMethod::l_isomap);
    if (needs_landmarks && c.path("landmarks_file").empty()) {
        if (c.landmarks < 1) throw ValidationError("l-isomap and landmark selection require landmarks (l) >= 1");
        if (c.landmark_strategy == LandmarkStrategy::maxmin && (c.seeds < 1 || c.seeds > c.landmarks)) {
            throw ValidationError("maxmin requires 1 <= seeds (s) <= landmarks (l)");
        }
        if (stage == Stage::embed && c.dims + 1 > c.landmarks) {
            throw ValidationError("l-isomap requires dims <= landmarks - 1");
        }
    }
    if (c.landmark_strategy == LandmarkStrategy::random && c.seeds > 0 && c.landmarks > 0 && c.seeds > c.landmarks) {
        throw ValidationError("seeds (s) cannot exceed landmarks (l)");
    }
}

}  // namespace simmap
