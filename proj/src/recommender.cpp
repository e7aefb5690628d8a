#include "quickstep/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace quickstep {

double round_confidence(double c)
{
    return parse_double(format_fixed(c, 6));
}

std::string format_classified(const ClassifiedPaper& p)
{
    if (!is_clean_field(p.doc_id) || !is_clean_field(p.topic)) {
        throw InvalidRequest("classified paper has an empty or multi-line field");
    }
    if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
        throw InvalidRequest("confidence outside [0,1]");
    }
    return p.doc_id + '\t' + std::string(to_string(p.group)) + '\t' + p.topic + '\t' + format_fixed(p.confidence, 6) +
        '\t' + p.classified_at.str();
}

namespace {

ClassifiedPaper parse_classified_fields(const std::vector<std::string_view>& f, std::string_view line)
{
    ClassifiedPaper p;
    p.doc_id = std::string(f[0]);
    p.group = parse_group(f[1]);
    p.topic = std::string(f[2]);
    p.confidence = parse_double(f[3]);
    p.classified_at = Date::parse(f[4]);
    if (!is_clean_field(p.doc_id) || !is_clean_field(p.topic) || !(p.confidence >= 0.0 && p.confidence <= 1.0)) {
        throw ParseError("bad classified record: '" + std::string(line) + "'");
    }
    return p;
}

}  // namespace

ClassifiedPaper parse_classified(std::string_view line)
{
    const auto f = split(line, '\t');
    if (f.size() != 5) {
        throw ParseError("classified record needs 5 fields: '" + std::string(line) + "'");
    }
    return parse_classified_fields(f, line);
}

void ClassifiedStore::upsert(ClassifiedPaper paper)
{
    paper.confidence = round_confidence(paper.confidence);
    auto key = std::make_pair(paper.group, paper.doc_id);
    papers_.insert_or_assign(std::move(key), std::move(paper));
}

const ClassifiedPaper* ClassifiedStore::find(const std::string& doc_id, Group group) const
{
    const auto it = papers_.find({group, doc_id});
    return it == papers_.end() ? nullptr : &it->second;
}

std::vector<const ClassifiedPaper*> ClassifiedStore::papers(Group group) const
{
    std::vector<const ClassifiedPaper*> out;
    for (auto it = papers_.lower_bound({group, std::string()}); it != papers_.end() && it->first.first == group; ++it) {
        out.push_back(&it->second);
    }
    return out;
}

NightlyResult nightly_classify(const std::vector<RawDocument>& pending,
    const std::map<Group, const BoostedCommittee*>& committees, ClassifiedStore& store, const StopList& stoplist,
    Date today)
{
    NightlyResult result;
    for (const auto& doc : pending) {
        std::optional<TermVector> vector;
        for (const auto& [group, committee] : committees) {
            if (committee == nullptr || store.contains(doc.doc_id, group)) {
                continue;
            }
            if (!vector) {
                vector = build_vector(doc, stoplist);
            }
            try {
                const auto ranking = classify(*committee, *vector);
                ClassifiedPaper paper{doc.doc_id, group, ranking.front().topic, ranking.front().confidence, today};
                store.upsert(paper);
                result.classified.push_back(*store.find(doc.doc_id, group));
            } catch (const Unclassifiable&) {
                result.retry.push_back({doc.doc_id, group});
            }
        }
    }
    return result;
}

std::string format_recommendation(const RecommendationRecord& r)
{
    if (!is_clean_field(r.user) || r.rank < 1 || !(r.score >= 0.0) || !std::isfinite(r.score)) {
        throw InvalidRequest("bad recommendation record");
    }
    return format_classified(r.paper) + '\t' + r.user + '\t' + std::to_string(r.rank) + '\t' + format_double(r.score);
}

RecommendationRecord parse_recommendation(std::string_view line)
{
    const auto f = split(line, '\t');
    if (f.size() != 8) {
        throw ParseError("recommendation record needs 8 fields: '" + std::string(line) + "'");
    }
    RecommendationRecord r;
    r.paper = parse_classified_fields(f, line);
    r.user = std::string(f[5]);
    r.rank = static_cast<int>(parse_int(f[6]));
    r.score = parse_double(f[7]);
    if (!is_clean_field(r.user) || r.rank < 1 || !(r.score >= 0.0)) {
        throw ParseError("bad recommendation record: '" + std::string(line) + "'");
    }
    return r;
}

std::vector<RecommendationRecord> to_records(const RecommendationSet& set)
{
    std::vector<RecommendationRecord> out;
    for (const auto& item : set.items) {
        out.push_back({{item.doc_id, set.group, item.topic, item.confidence, set.date}, set.user, item.rank, item.score});
    }
    return out;
}

RecommendationSet daily_recommend(const InterestProfile& profile, Group group, const ClassifiedStore& store,
    const std::set<std::string>& seen, int n, int topics)
{
    if (n < 1) {
        throw InvalidRequest("n_recommendations must be >= 1");
    }
    RecommendationSet set{profile.user, group, profile.computed_at, {}};
    const auto top = top_topics(profile, topics);
    if (top.empty()) {
        return set;
    }
    std::vector<Recommendation> candidates;
    for (const auto* paper : store.papers(group)) {
        if (std::find(top.begin(), top.end(), paper->topic) == top.end() || seen.count(paper->doc_id)) {
            continue;
        }
        candidates.push_back({paper->doc_id, paper->topic, paper->confidence,
            profile.of(paper->topic) * paper->confidence, 0});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Recommendation& a, const Recommendation& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        if (a.confidence != b.confidence) {
            return a.confidence > b.confidence;
        }
        return a.doc_id < b.doc_id;
    });
    if (static_cast<int>(candidates.size()) > n) {
        candidates.resize(static_cast<std::size_t>(n));
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        candidates[i].rank = static_cast<int>(i) + 1;
    }
    set.items = std::move(candidates);
    return set;
}

}  // namespace quickstep
