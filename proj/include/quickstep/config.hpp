#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "quickstep/profiler.hpp"

namespace quickstep {

/// Service and job settings. JSON keys match the member names; event weights
/// sit under "weights" keyed by event kind.
struct Config {
    int k = 1;
    int boost_rounds = 10;
    int cv_folds = 10;
    std::uint64_t boost_seed = 1;
    ProfileConfig profile;
    int n_recommendations = 10;
    int n_topics = 3;
    std::vector<std::string> accepted_suffixes{".ps", ".pdf", ".ps.gz", ".ps.Z", ".pdf.gz"};
    std::filesystem::path stoplist_path = std::filesystem::path(QUICKSTEP_DATA_DIR) / "stoplist.smart.txt";
    std::optional<int> recommendation_cooldown_days;  // empty: never re-recommend
    std::string auth_token;                           // empty: no authentication
    std::filesystem::path fetch_root;                 // local fetch adapter directory
    bool fsync = false;
};

/// Relative paths are resolved against `base_dir`. Unknown keys are rejected.
Config parse_config(std::string_view json, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);
std::string to_json(const Config& c);

}  // namespace quickstep
