#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "quickstep/common.hpp"
#include "quickstep/taxonomy.hpp"

namespace quickstep {

enum class EventKind { browsed, rated_interesting, rated_not_interesting, jump, correction, recommended_seen };

std::string_view to_string(EventKind k);
EventKind parse_event_kind(std::string_view s);

/// One date-stamped user action. For corrections `topic` is the new topic.
struct FeedbackEvent {
    Timestamp at;
    std::string user;
    EventKind kind = EventKind::browsed;
    TopicId topic;
    std::optional<std::string> paper;
    Group group = Group::flat;

    bool operator==(const FeedbackEvent&) const = default;
};

/// `<timestamp>\t<user>\t<kind>\t<topic>\t<doc-or-"-">\t<group>`
std::string format_event(const FeedbackEvent& e);
FeedbackEvent parse_event(std::string_view line);

using UserGroups = std::map<std::string, Group>;

/// Append-only event history with exact-duplicate suppression.
class EventLog {
public:
    EventLog() = default;

    const std::vector<FeedbackEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool contains(const FeedbackEvent& e) const { return seen_.count(key(e)) != 0; }

    /// Appends unless an identical event is already present; returns whether it was added.
    bool append(const FeedbackEvent& e);

private:
    using Key = std::tuple<std::int64_t, std::string, EventKind, TopicId, std::string>;
    static Key key(const FeedbackEvent& e);

    std::vector<FeedbackEvent> events_;
    std::set<Key> seen_;
};

/// Validates against the user registry and the group's taxonomy, then appends.
/// Returns false for an exact duplicate.
bool record_event(EventLog& log, const FeedbackEvent& event, const Taxonomy& taxonomy, const UserGroups& users);

struct EventWeights {
    double browsed = 1.0;
    double jump = 2.0;
    double rated_interesting = 10.0;
    double rated_not_interesting = -10.0;
    double correction = 1.0;
    double recommended_seen = 0.0;

    double of(EventKind k) const;
};

struct ProfileConfig {
    EventWeights weights;
    /// Share of an event passed to each further ancestor (hierarchical taxonomies only).
    double propagation_factor = 0.5;
    /// Decay is 1 / (1 + age_days / decay_scale_days).
    double decay_scale_days = 1.0;
};

struct InterestProfile {
    std::string user;
    Date computed_at;
    TopicId root;
    std::map<TopicId, double> interest;  // zero entries omitted

    double of(const TopicId& t) const
    {
        const auto it = interest.find(t);
        return it == interest.end() ? 0.0 : it->second;
    }
    /// The same profile without the synthetic root's entry.
    std::map<TopicId, double> without_root() const;
};

/// Whole days from the event's date to `now`, never negative.
int age_days(Timestamp at, Date now);

/// Sum over the user's events up to `now` of weight * factor^distance / decay.
/// Flat taxonomies credit only the event's own topic.
InterestProfile compute_profile(std::span<const FeedbackEvent> events, const Taxonomy& taxonomy,
    const std::string& user, Date now, const ProfileConfig& config = {});

/// Up to n topics with positive interest, best first, ties by id; never the root.
std::vector<TopicId> top_topics(const InterestProfile& profile, int n = 3);

}  // namespace quickstep
