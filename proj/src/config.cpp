#include "quickstep/config.hpp"

#include <json.hpp>

#include "quickstep/store.hpp"

namespace quickstep {

using nlohmann::json;

namespace {

const char* const kKinds[] = {"browsed", "rated_interesting", "rated_not_interesting", "jump", "correction",
    "recommended_seen"};

double& weight_slot(EventWeights& w, std::string_view kind)
{
    switch (parse_event_kind(kind)) {
    case EventKind::browsed:
        return w.browsed;
    case EventKind::rated_interesting:
        return w.rated_interesting;
    case EventKind::rated_not_interesting:
        return w.rated_not_interesting;
    case EventKind::jump:
        return w.jump;
    case EventKind::correction:
        return w.correction;
    case EventKind::recommended_seen:
        return w.recommended_seen;
    }
    throw ParseError("unknown event kind");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

int bounded(const json& v, const char* key, int lo, int hi)
{
    const auto n = v.get<int>();
    if (n < lo || n > hi) {
        throw ParseError(std::string("config '") + key + "' must be in [" + std::to_string(lo) + ", " +
            std::to_string(hi) + "]");
    }
    return n;
}

}  // namespace

Config parse_config(std::string_view text, const std::filesystem::path& base_dir)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ParseError("config must be a JSON object");
    }
    Config c;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "k") {
                c.k = bounded(v, "k", 1, 9);
            } else if (key == "boost_rounds") {
                c.boost_rounds = bounded(v, "boost_rounds", 1, 1000);
            } else if (key == "cv_folds") {
                c.cv_folds = bounded(v, "cv_folds", 2, 1000);
            } else if (key == "boost_seed") {
                c.boost_seed = v.get<std::uint64_t>();
            } else if (key == "decay_scale_days") {
                c.profile.decay_scale_days = v.get<double>();
                if (!(c.profile.decay_scale_days > 0.0)) {
                    throw ParseError("config 'decay_scale_days' must be positive");
                }
            } else if (key == "propagation_factor") {
                c.profile.propagation_factor = v.get<double>();
                if (!(c.profile.propagation_factor >= 0.0 && c.profile.propagation_factor <= 1.0)) {
                    throw ParseError("config 'propagation_factor' must be in [0, 1]");
                }
            } else if (key == "weights") {
                for (const auto& [kind, w] : v.items()) {
                    weight_slot(c.profile.weights, kind) = w.get<double>();
                }
            } else if (key == "n_recommendations") {
                c.n_recommendations = bounded(v, "n_recommendations", 1, 1000);
            } else if (key == "n_topics") {
                c.n_topics = bounded(v, "n_topics", 1, 1000);
            } else if (key == "accepted_suffixes") {
                c.accepted_suffixes = v.get<std::vector<std::string>>();
            } else if (key == "stoplist_path") {
                c.stoplist_path = resolve(base_dir, v.get<std::string>());
            } else if (key == "recommendation_cooldown_days") {
                if (v.is_null()) {
                    c.recommendation_cooldown_days.reset();
                } else {
                    c.recommendation_cooldown_days = bounded(v, "recommendation_cooldown_days", 1, 1 << 20);
                }
            } else if (key == "auth_token") {
                c.auth_token = v.get<std::string>();
            } else if (key == "fetch_root") {
                c.fetch_root = resolve(base_dir, v.get<std::string>());
            } else if (key == "fsync") {
                c.fsync = v.get<bool>();
            } else {
                throw ParseError("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("config has a value of the wrong type: ") + e.what());
    }
    return c;
}

Config load_config(const std::filesystem::path& path)
{
    return parse_config(read_file(path), path.parent_path());
}

std::string to_json(const Config& c)
{
    json weights = json::object();
    for (const auto* kind : kKinds) {
        weights[kind] = c.profile.weights.of(parse_event_kind(kind));
    }
    json j{{"k", c.k}, {"boost_rounds", c.boost_rounds}, {"cv_folds", c.cv_folds}, {"boost_seed", c.boost_seed},
        {"decay_scale_days", c.profile.decay_scale_days}, {"propagation_factor", c.profile.propagation_factor},
        {"weights", weights}, {"n_recommendations", c.n_recommendations}, {"n_topics", c.n_topics},
        {"accepted_suffixes", c.accepted_suffixes}, {"stoplist_path", c.stoplist_path.string()},
        {"recommendation_cooldown_days",
            c.recommendation_cooldown_days ? json(*c.recommendation_cooldown_days) : json(nullptr)},
        {"auth_token", c.auth_token}, {"fetch_root", c.fetch_root.string()}, {"fsync", c.fsync}};
    return j.dump(2);
}

}  // namespace quickstep
