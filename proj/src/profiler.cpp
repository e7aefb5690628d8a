#include "quickstep/profiler.hpp"

#include <algorithm>
#include <cmath>

namespace quickstep {

std::string_view to_string(EventKind k)
{
    switch (k) {
    case EventKind::browsed:
        return "browsed";
    case EventKind::rated_interesting:
        return "rated_interesting";
    case EventKind::rated_not_interesting:
        return "rated_not_interesting";
    case EventKind::jump:
        return "jump";
    case EventKind::correction:
        return "correction";
    case EventKind::recommended_seen:
        return "recommended_seen";
    }
    return "browsed";
}

EventKind parse_event_kind(std::string_view s)
{
    for (const auto k : {EventKind::browsed, EventKind::rated_interesting, EventKind::rated_not_interesting,
             EventKind::jump, EventKind::correction, EventKind::recommended_seen}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw ParseError("unknown event kind '" + std::string(s) + "'");
}

std::string format_event(const FeedbackEvent& e)
{
    if (!is_clean_field(e.user) || !is_clean_field(e.topic) || (e.paper && !is_clean_field(*e.paper)) ||
        (e.paper && *e.paper == "-")) {
        throw InvalidRequest("event has an empty or multi-line field");
    }
    std::string line = e.at.str();
    line += '\t';
    line += e.user;
    line += '\t';
    line += to_string(e.kind);
    line += '\t';
    line += e.topic;
    line += '\t';
    line += e.paper ? *e.paper : std::string("-");
    line += '\t';
    line += to_string(e.group);
    return line;
}

FeedbackEvent parse_event(std::string_view line)
{
    const auto f = split(line, '\t');
    if (f.size() != 6) {
        throw ParseError("event line needs 6 fields: '" + std::string(line) + "'");
    }
    FeedbackEvent e;
    e.at = Timestamp::parse(f[0]);
    e.user = std::string(f[1]);
    e.kind = parse_event_kind(f[2]);
    e.topic = std::string(f[3]);
    if (f[4] != "-") {
        e.paper = std::string(f[4]);
    }
    e.group = parse_group(f[5]);
    if (!is_clean_field(e.user) || !is_clean_field(e.topic) || (e.paper && !is_clean_field(*e.paper))) {
        throw ParseError("event line has an empty field: '" + std::string(line) + "'");
    }
    return e;
}

EventLog::Key EventLog::key(const FeedbackEvent& e)
{
    return {e.at.seconds, e.user, e.kind, e.topic, e.paper.value_or("-")};
}

bool EventLog::append(const FeedbackEvent& e)
{
    if (!seen_.insert(key(e)).second) {
        return false;
    }
    events_.push_back(e);
    return true;
}

bool record_event(EventLog& log, const FeedbackEvent& event, const Taxonomy& taxonomy, const UserGroups& users)
{
    const auto u = users.find(event.user);
    if (u == users.end()) {
        throw NotFoundError("unknown user '" + event.user + "'");
    }
    if (u->second != event.group) {
        throw InvalidRequest("user '" + event.user + "' belongs to the " + std::string(to_string(u->second)) +
            " group");
    }
    if (!taxonomy.contains(event.topic)) {
        throw NotFoundError("unknown topic '" + event.topic + "'");
    }
    format_event(event);  // field validation
    return log.append(event);
}

double EventWeights::of(EventKind k) const
{
    switch (k) {
    case EventKind::browsed:
        return browsed;
    case EventKind::rated_interesting:
        return rated_interesting;
    case EventKind::rated_not_interesting:
        return rated_not_interesting;
    case EventKind::jump:
        return jump;
    case EventKind::correction:
        return correction;
    case EventKind::recommended_seen:
        return recommended_seen;
    }
    return 0.0;
}

std::map<TopicId, double> InterestProfile::without_root() const
{
    auto out = interest;
    out.erase(root);
    return out;
}

int age_days(Timestamp at, Date now)
{
    return std::max(0, now - at.date());
}

InterestProfile compute_profile(std::span<const FeedbackEvent> events, const Taxonomy& taxonomy,
    const std::string& user, Date now, const ProfileConfig& config)
{
    InterestProfile profile{user, now, taxonomy.root(), {}};
    const double factor = taxonomy.mode() == TaxonomyMode::hierarchical ? config.propagation_factor : 0.0;
    for (const auto& e : events) {
        if (e.user != user || e.at.date() > now) {
            continue;
        }
        const double w = config.weights.of(e.kind);
        if (w == 0.0) {
            continue;
        }
        const double base = w / (1.0 + age_days(e.at, now) / config.decay_scale_days);
        profile.interest[e.topic] += base;
        if (factor == 0.0) {
            continue;
        }
        double share = factor;
        for (const auto& ancestor : taxonomy.ancestors(e.topic)) {
            profile.interest[ancestor] += base * share;
            share *= factor;
        }
    }
    std::erase_if(profile.interest, [](const auto& kv) { return kv.second == 0.0; });
    return profile;
}

std::vector<TopicId> top_topics(const InterestProfile& profile, int n)
{
    if (n < 1) {
        throw InvalidRequest("top_topics needs n >= 1");
    }
    std::vector<std::pair<TopicId, double>> positive;
    for (const auto& [t, v] : profile.interest) {
        if (v > 0.0 && t != profile.root) {
            positive.emplace_back(t, v);
        }
    }
    std::stable_sort(positive.begin(), positive.end(),
        [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
    std::vector<TopicId> out;
    for (const auto& p : positive) {
        if (static_cast<int>(out.size()) == n) {
            break;
        }
        out.push_back(p.first);
    }
    return out;
}

}  // namespace quickstep
