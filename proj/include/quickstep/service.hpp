#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "quickstep/classifier.hpp"
#include "quickstep/config.hpp"
#include "quickstep/profiler.hpp"
#include "quickstep/recommender.hpp"
#include "quickstep/records.hpp"
#include "quickstep/taxonomy.hpp"
#include "quickstep/text.hpp"

namespace quickstep {

class FetchError : public Error {
public:
    using Error::Error;
};

/// A cycle requested out of order (daily before nightly, or going back in time).
class PhaseOrderError : public Error {
public:
    using Error::Error;
};

/// Recommendations requested before any daily cycle has run.
class NoRecommendations : public Error {
public:
    using Error::Error;
};

/// Supplies plain text for a document URL.
class Fetcher {
public:
    virtual ~Fetcher() = default;
    virtual std::string fetch(const std::string& url) = 0;
};

/// `file://` URLs are read directly; any other URL maps to `<root>/<last path segment>`
/// with a `.txt` extension added when the file itself does not exist.
class LocalFileFetcher : public Fetcher {
public:
    explicit LocalFileFetcher(std::filesystem::path root) : root_(std::move(root)) {}
    std::string fetch(const std::string& url) override;

private:
    std::filesystem::path root_;
};

class MapFetcher : public Fetcher {
public:
    explicit MapFetcher(std::map<std::string, std::string> texts = {}) : texts_(std::move(texts)) {}
    void add(std::string url, std::string text) { texts_.insert_or_assign(std::move(url), std::move(text)); }
    std::string fetch(const std::string& url) override;

private:
    std::map<std::string, std::string> texts_;
};

using Clock = std::function<Timestamp()>;

struct BrowseLogEntry {
    std::string user;
    std::string url;
    Timestamp at;
    std::optional<std::string> text;  // skips the fetch adapter when present
};

struct EntryError {
    std::size_t index;
    std::string message;
};

struct IngestReport {
    std::size_t accepted = 0;
    std::size_t filtered = 0;
    std::vector<EntryError> errors;
};

enum class FeedbackKind { interesting, not_interesting, jump, correction };
FeedbackKind parse_feedback_kind(std::string_view s);

struct ServedSet {
    RecommendationSet set;
    bool first_view = false;  // this call emitted the exposure events
};

struct GroupTraining {
    std::size_t examples = 0;
    int rounds_completed = 0;
    bool trained = false;
};

struct CycleReport {
    Phase phase = Phase::nightly;
    Date as_of;
    std::map<Group, GroupTraining> training;
    std::size_t pending = 0;
    std::size_t classified = 0;
    std::size_t retried = 0;
    std::size_t browsed_events = 0;
    std::size_t profiles = 0;
    std::size_t recommendations = 0;
};

struct ExampleReceipt {
    std::string doc_id;
    TopicId topic;
    Group group;
    std::size_t training_size;
};

/// The whole pipeline over one DataRoot directory. Every mutation appends to
/// a file first; opening a DataRoot replays those files into memory.
class Service {
public:
    /// Creates the directory and its two taxonomy files if they do not exist.
    static void initialize(const std::filesystem::path& root, const Taxonomy& flat, const Taxonomy& ontology);

    Service(std::filesystem::path root, Config config, std::unique_ptr<Fetcher> fetcher, Clock clock);
    ~Service();

    const Config& config() const { return config_; }
    const std::filesystem::path& root() const { return root_; }

    UserAccount create_user(const std::string& user, Group group);
    std::optional<UserAccount> user(const std::string& user) const;
    std::vector<UserAccount> users() const;

    IngestReport ingest_browse_log(const std::vector<BrowseLogEntry>& entries);

    /// The user's set from the latest daily cycle. Unless `preview`, the first
    /// serve of a set appends one recommended_seen event per item.
    ServedSet serve_recommendations(const std::string& user, bool preview = false);

    /// Returns false when the identical event was already recorded.
    bool submit_feedback(const std::string& user, const std::string& doc_id, FeedbackKind kind,
        const std::optional<TopicId>& corrected_topic = std::nullopt);

    /// `url_or_doc_id` names a registered document or a URL to fetch (or use `text`).
    ExampleReceipt submit_example(const std::string& user, const std::string& url_or_doc_id, const TopicId& topic,
        const std::optional<std::string>& text = std::nullopt);

    /// Bootstrap examples, not tied to a user.
    ExampleReceipt add_training_example(Group group, const std::string& url, const std::string& text,
        const TopicId& topic, ExampleSource source = ExampleSource::bootstrap);

    /// Only the flat group's list is extensible.
    TopicNode add_topic(Group group, const std::string& label, const std::optional<TopicId>& parent = std::nullopt);

    Taxonomy taxonomy(Group group) const;
    std::size_t training_size(Group group) const;

    CycleReport run_cycle(Phase phase, Date as_of);

    std::vector<FeedbackEvent> events() const;
    std::optional<ClassifiedPaper> classification(const std::string& doc_id, Group group) const;
    std::optional<std::string> document_url(const std::string& doc_id) const;
    InterestProfile profile(const std::string& user, Date now) const;

    /// Called under the write lock for every newly appended event.
    void on_event(std::function<void(const FeedbackEvent&)> listener);

private:
    struct Files;
    using Key = std::pair<std::string, Date>;  // (user, set date)

    TaxonomyMode mode_of(Group g) const { return g == Group::flat ? TaxonomyMode::flat : TaxonomyMode::hierarchical; }
    const UserAccount& require_user(const std::string& user) const;
    std::string register_document(const std::string& url, const std::optional<std::string>& text);
    const TermVector& vector_of(const std::string& doc_id);
    ExampleReceipt append_example(Group group, const std::string& doc_id, const TopicId& topic, ExampleSource source);
    bool append_event(const FeedbackEvent& e);
    void apply_recommendation(const RecommendationRecord& r);
    std::set<std::string> seen_by(const std::string& user, Date day) const;
    std::optional<Date> latest_daily(Date on_or_before) const;
    CycleReport run_nightly(Date as_of);
    CycleReport run_daily(Date as_of);

    std::filesystem::path root_;
    Config config_;
    std::unique_ptr<Fetcher> fetcher_;
    Clock clock_;
    StopList stoplist_;
    SuffixFilter suffixes_;
    std::unique_ptr<Files> files_;

    mutable std::shared_mutex mutex_;
    std::map<std::string, UserAccount> users_;
    UserGroups user_groups_;
    std::map<Group, Taxonomy> taxonomies_;
    std::map<Group, TrainingSet> training_;
    std::map<std::string, DocumentRecord> documents_;
    std::map<std::string, TermVector> vectors_;
    std::vector<std::string> browsed_docs_;  // distinct, in first-browse order
    std::set<std::string> browsed_doc_set_;
    std::set<std::tuple<std::string, std::int64_t, std::string>> browse_events_;  // (user, at, doc) emitted
    EventLog events_;
    std::map<std::string, std::vector<FeedbackEvent>> events_by_user_;
    std::map<std::string, std::set<std::string>> seen_docs_;  // browsed, jumped to or exposed
    ClassifiedStore classified_;
    std::map<Key, RecommendationSet> sets_;
    std::map<std::string, std::map<std::string, std::vector<Date>>> recommended_on_;  // user -> doc -> set dates
    std::set<Key> served_;
    std::vector<CycleRecord> cycles_;
    std::vector<std::function<void(const FeedbackEvent&)>> listeners_;
};

}  // namespace quickstep
