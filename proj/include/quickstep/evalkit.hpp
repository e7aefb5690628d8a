#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "quickstep/config.hpp"
#include "quickstep/profiler.hpp"

namespace quickstep {

enum class Metric { good_topic, bad_topic, good_jump, correction };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view s);

struct MetricPoint {
    Date date;
    double value = 0;
    bool operator==(const MetricPoint&) const = default;
};

/// Cumulative ratio per event date; dates with an empty denominator are left out.
struct MetricSeries {
    Group group = Group::flat;
    Metric metric = Metric::good_topic;
    std::vector<MetricPoint> points;
    bool operator==(const MetricSeries&) const = default;
};

/// Counts feedback events into per-day buckets; series are derived on demand,
/// so feeding events one at a time or as a whole log gives the same numbers.
///
/// A recommended topic is a (user, day, topic) triple from recommended_seen
/// events. It is bad when the user's last rating of that topic on that day is
/// not_interesting. A jump is good unless its (user, day, topic) is bad.
class MetricAccumulator {
public:
    void add(const FeedbackEvent& e);
    void add_all(std::span<const FeedbackEvent> events);

    MetricSeries series(Metric metric, Group group, Date until) const;
    /// Every metric for both groups, ordered by group then metric.
    std::vector<MetricSeries> all(Date until) const;

private:
    using UserTopic = std::pair<std::string, TopicId>;
    struct Rating {
        Timestamp at;
        bool bad = false;
    };
    struct Day {
        std::set<UserTopic> shown;
        std::map<UserTopic, Rating> ratings;
        std::vector<UserTopic> jumps;
        std::size_t seen = 0;
        std::size_t corrections = 0;
        bool is_bad(const UserTopic& key) const;
    };
    std::map<Group, std::map<Date, Day>> days_;
};

MetricSeries good_topic_ratio(std::span<const FeedbackEvent> log, Group group, Date until);
MetricSeries bad_topic_ratio(std::span<const FeedbackEvent> log, Group group, Date until);
MetricSeries good_jump_ratio(std::span<const FeedbackEvent> log, Group group, Date until);
MetricSeries correction_ratio(std::span<const FeedbackEvent> log, Group group, Date until);

/// Reads an events.log without modifying it; an unterminated last line is ignored.
std::vector<FeedbackEvent> read_event_log(const std::filesystem::path& path);

/// `date\tgroup\tmetric\tvalue` lines with a header row.
std::string format_report(const std::vector<MetricSeries>& series);

/// Every series computed from `<root>/events.log`.
std::vector<MetricSeries> evaluate_data_root(const std::filesystem::path& root, Date until);

struct SimulationConfig {
    std::filesystem::path root;  // created; must not already hold a DataRoot
    std::filesystem::path taxonomy_path = std::filesystem::path(QUICKSTEP_DATA_DIR) / "taxonomy.cs.tsv";
    int users = 20;  // half flat, half ontology, paired by persona
    int papers = 500;
    int days = 45;
    std::uint64_t seed = 42;
    Date start = Date::parse("2024-01-01");
    Config service;

    // Corpus.
    int core_words = 20;
    int noise_words = 400;
    int min_length = 80;
    int max_length = 200;
    double category_paper_share = 0.15;
    double related_share = 0.20;  // tokens from the parent (leaf papers) or a child (category papers)
    double noise_share = 0.55;
    int bootstrap_per_topic = 3;

    // Behaviour.
    int min_interests = 2;
    int max_interests = 3;
    double home_category_affinity = 0.5;
    double serve_probability = 0.7;
    double rating_flip = 0.05;
    double rate_good = 0.3;
    double rate_bad = 0.8;
    double jump_scale = 0.15;
    double correct_probability = 0.1;
    int min_browse = 1;
    int max_browse = 3;
    double random_browse = 0.25;

    void validate() const;
};

struct SyntheticUser {
    std::string user;
    Group group = Group::flat;
    std::map<TopicId, double> affinity;  // true interests, fixed for the run
    std::uint64_t seed = 0;              // behaviour stream; the two users of a persona share affinities only
};

struct SimulationResult {
    std::vector<SyntheticUser> users;
    Date last_day;
    std::vector<MetricSeries> series;  // accumulated online while the run appended events
    std::string report;                // also written to <root>/report.tsv
};

SimulationResult simulate(const SimulationConfig& config);

/// Last value of a series, 0 when empty.
double final_value(const MetricSeries& s);
const MetricSeries& find_series(const std::vector<MetricSeries>& all, Group group, Metric metric);

}  // namespace quickstep
