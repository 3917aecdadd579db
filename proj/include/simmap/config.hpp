#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "simmap/landmarks.hpp"

namespace simmap {

enum class EmbedMethod { isomap, l_isomap };

std::string_view method_name(EmbedMethod m);
EmbedMethod parse_method(std::string_view text);

/// Every tunable of the pipeline. Keys accepted by set() and by config
/// files are the field names below; path keys are listed in path_keys().
struct PipelineConfig {
    std::uint32_t min_cooc = 5;
    std::size_t dims = 10;
    EmbedMethod method = EmbedMethod::isomap;
    LandmarkStrategy landmark_strategy = LandmarkStrategy::random;
    std::size_t landmarks = 0;  // l; 0 = unset
    std::size_t seeds = 0;      // s; 0 = unset
    std::uint64_t rng_seed = 1;
    std::size_t n_cap = 100'000;
    unsigned threads = 0;  // 0 = all cores
    bool timestamp = true;
    std::map<std::string, std::filesystem::path> paths;

    /// Parses and stores one key. Throws ValidationError for an unknown key
    /// or an unparsable value.
    void set(std::string_view key, std::string_view value);

    /// Path for `key`, or empty when unset.
    std::filesystem::path path(std::string_view key) const;
};

const std::vector<std::string>& path_keys();
const std::vector<std::string>& scalar_keys();

/// Flat `key=value` lines; blank lines and lines starting with '#' are
/// ignored, whitespace around key and value is trimmed.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text, const std::string& source);
void apply_config_file(PipelineConfig& config, const std::filesystem::path& file);

enum class Stage { cooc, graph, landmarks, embed, eval };

/// Cross-field checks for the given stage; throws ValidationError before any
/// computation starts.
void validate(const PipelineConfig& config, Stage stage);

}  // namespace simmap
