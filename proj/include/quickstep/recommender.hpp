#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "quickstep/classifier.hpp"
#include "quickstep/common.hpp"
#include "quickstep/profiler.hpp"
#include "quickstep/text.hpp"

namespace quickstep {

/// Current classification of one document for one group. Confidence is kept
/// at the 6 decimals the store writes, so a reloaded store is identical.
struct ClassifiedPaper {
    std::string doc_id;
    Group group = Group::flat;
    TopicId topic;
    double confidence = 0.0;
    Date classified_at;

    bool operator==(const ClassifiedPaper&) const = default;
};

double round_confidence(double c);

/// `<doc_id>\t<group>\t<topic>\t<confidence 6dp>\t<date>`
std::string format_classified(const ClassifiedPaper& p);
ClassifiedPaper parse_classified(std::string_view line);

/// One record per (doc_id, group); a later upsert overwrites.
class ClassifiedStore {
public:
    void upsert(ClassifiedPaper paper);
    const ClassifiedPaper* find(const std::string& doc_id, Group group) const;
    bool contains(const std::string& doc_id, Group group) const { return find(doc_id, group) != nullptr; }
    /// The group's papers ordered by doc_id.
    std::vector<const ClassifiedPaper*> papers(Group group) const;
    std::size_t size() const { return papers_.size(); }

private:
    std::map<std::pair<Group, std::string>, ClassifiedPaper> papers_;
};

struct RetryEntry {
    std::string doc_id;
    Group group;
};

struct NightlyResult {
    std::vector<ClassifiedPaper> classified;  // in (document, group) order
    std::vector<RetryEntry> retry;            // unclassifiable, try again next night
};

/// Vectorizes each document once and classifies it with every committee
/// whose group does not yet hold a record for it.
NightlyResult nightly_classify(const std::vector<RawDocument>& pending,
    const std::map<Group, const BoostedCommittee*>& committees, ClassifiedStore& store, const StopList& stoplist,
    Date today);

struct Recommendation {
    std::string doc_id;
    TopicId topic;
    double confidence = 0.0;
    double score = 0.0;
    int rank = 0;

    bool operator==(const Recommendation&) const = default;
};

struct RecommendationSet {
    std::string user;
    Group group = Group::flat;
    Date date;
    std::vector<Recommendation> items;

    bool operator==(const RecommendationSet&) const = default;
};

/// Recommendation-log line: the classified-paper fields followed by user, rank and score.
struct RecommendationRecord {
    ClassifiedPaper paper;
    std::string user;
    int rank = 0;
    double score = 0.0;

    bool operator==(const RecommendationRecord&) const = default;
};

std::string format_recommendation(const RecommendationRecord& r);
RecommendationRecord parse_recommendation(std::string_view line);

/// Log records for a set. The classified date is the set's date.
std::vector<RecommendationRecord> to_records(const RecommendationSet& set);

/// Scores candidates of the profile's top topics as interest * confidence and
/// keeps the best n (score desc, confidence desc, doc_id asc).
RecommendationSet daily_recommend(const InterestProfile& profile, Group group, const ClassifiedStore& store,
    const std::set<std::string>& seen, int n = 10, int topics = 3);

}  // namespace quickstep
