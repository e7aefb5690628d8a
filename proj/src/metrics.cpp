#include <algorithm>

#include "quickstep/evalkit.hpp"
#include "quickstep/store.hpp"

namespace quickstep {

namespace {

constexpr Metric kAllMetrics[] = {Metric::good_topic, Metric::bad_topic, Metric::good_jump, Metric::correction};

}  // namespace

std::string_view to_string(Metric m)
{
    switch (m) {
    case Metric::good_topic:
        return "good_topic_ratio";
    case Metric::bad_topic:
        return "bad_topic_ratio";
    case Metric::good_jump:
        return "good_jump_ratio";
    case Metric::correction:
        return "correction_ratio";
    }
    return "?";
}

Metric parse_metric(std::string_view s)
{
    for (const auto m : kAllMetrics) {
        if (to_string(m) == s) {
            return m;
        }
    }
    throw ParseError("unknown metric '" + std::string(s) + "'");
}

bool MetricAccumulator::Day::is_bad(const UserTopic& key) const
{
    const auto it = ratings.find(key);
    return it != ratings.end() && it->second.bad;
}

void MetricAccumulator::add(const FeedbackEvent& e)
{
    auto& day = days_[e.group][e.at.date()];
    switch (e.kind) {
    case EventKind::recommended_seen:
        ++day.seen;
        day.shown.emplace(e.user, e.topic);
        break;
    case EventKind::rated_interesting:
    case EventKind::rated_not_interesting: {
        // Later in the day wins; at equal times the later line in the log wins.
        auto [it, fresh] = day.ratings.try_emplace({e.user, e.topic});
        if (fresh || e.at >= it->second.at) {
            it->second = {e.at, e.kind == EventKind::rated_not_interesting};
        }
        break;
    }
    case EventKind::jump:
        day.jumps.emplace_back(e.user, e.topic);
        break;
    case EventKind::correction:
        ++day.corrections;
        break;
    case EventKind::browsed:
        break;
    }
}

void MetricAccumulator::add_all(std::span<const FeedbackEvent> events)
{
    for (const auto& e : events) {
        add(e);
    }
}

MetricSeries MetricAccumulator::series(Metric metric, Group group, Date until) const
{
    MetricSeries out{group, metric, {}};
    const auto g = days_.find(group);
    if (g == days_.end()) {
        return out;
    }
    std::size_t topics = 0, bad = 0, seen = 0, good_jumps = 0, corrections = 0;
    for (const auto& [date, day] : g->second) {
        if (until < date) {
            break;
        }
        topics += day.shown.size();
        bad += static_cast<std::size_t>(
            std::count_if(day.shown.begin(), day.shown.end(), [&](const UserTopic& k) { return day.is_bad(k); }));
        seen += day.seen;
        good_jumps += static_cast<std::size_t>(
            std::count_if(day.jumps.begin(), day.jumps.end(), [&](const UserTopic& k) { return !day.is_bad(k); }));
        corrections += day.corrections;

        const bool topic_metric = metric == Metric::good_topic || metric == Metric::bad_topic;
        const std::size_t denominator = topic_metric ? topics : seen;
        if (denominator == 0) {
            continue;
        }
        std::size_t numerator = 0;
        switch (metric) {
        case Metric::good_topic:
            numerator = topics - bad;
            break;
        case Metric::bad_topic:
            numerator = bad;
            break;
        case Metric::good_jump:
            numerator = good_jumps;
            break;
        case Metric::correction:
            numerator = corrections;
            break;
        }
        out.points.push_back({date, static_cast<double>(numerator) / static_cast<double>(denominator)});
    }
    return out;
}

std::vector<MetricSeries> MetricAccumulator::all(Date until) const
{
    std::vector<MetricSeries> out;
    for (const auto g : kAllGroups) {
        for (const auto m : kAllMetrics) {
            out.push_back(series(m, g, until));
        }
    }
    return out;
}

namespace {

MetricSeries one(std::span<const FeedbackEvent> log, Metric metric, Group group, Date until)
{
    MetricAccumulator acc;
    acc.add_all(log);
    return acc.series(metric, group, until);
}

}  // namespace

MetricSeries good_topic_ratio(std::span<const FeedbackEvent> log, Group group, Date until)
{
    return one(log, Metric::good_topic, group, until);
}

MetricSeries bad_topic_ratio(std::span<const FeedbackEvent> log, Group group, Date until)
{
    return one(log, Metric::bad_topic, group, until);
}

MetricSeries good_jump_ratio(std::span<const FeedbackEvent> log, Group group, Date until)
{
    return one(log, Metric::good_jump, group, until);
}

MetricSeries correction_ratio(std::span<const FeedbackEvent> log, Group group, Date until)
{
    return one(log, Metric::correction, group, until);
}

std::vector<FeedbackEvent> read_event_log(const std::filesystem::path& path)
{
    const auto text = read_file(path);
    std::vector<FeedbackEvent> events;
    std::size_t start = 0;
    std::size_t line_no = 1;
    for (auto nl = text.find('\n'); nl != std::string::npos; nl = text.find('\n', start), ++line_no) {
        try {
            events.push_back(parse_event(std::string_view(text).substr(start, nl - start)));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
        start = nl + 1;
    }
    return events;
}

std::string format_report(const std::vector<MetricSeries>& series)
{
    std::string out = "date\tgroup\tmetric\tvalue\n";
    for (const auto& s : series) {
        for (const auto& p : s.points) {
            out += p.date.str() + '\t' + std::string(to_string(s.group)) + '\t' + std::string(to_string(s.metric)) +
                '\t' + format_double(p.value) + '\n';
        }
    }
    return out;
}

std::vector<MetricSeries> evaluate_data_root(const std::filesystem::path& root, Date until)
{
    MetricAccumulator acc;
    acc.add_all(read_event_log(root / "events.log"));
    return acc.all(until);
}

double final_value(const MetricSeries& s)
{
    return s.points.empty() ? 0.0 : s.points.back().value;
}

const MetricSeries& find_series(const std::vector<MetricSeries>& all, Group group, Metric metric)
{
    for (const auto& s : all) {
        if (s.group == group && s.metric == metric) {
            return s;
        }
    }
    throw NotFoundError("no " + std::string(to_string(metric)) + " series for " + std::string(to_string(group)));
}

}  // namespace quickstep
