#pragma once

// Line formats of the DataRoot collections that are not owned by another module.

#include <string>
#include <string_view>

#include "quickstep/classifier.hpp"
#include "quickstep/common.hpp"
#include "quickstep/profiler.hpp"
#include "quickstep/recommender.hpp"
#include "quickstep/store.hpp"
#include "quickstep/taxonomy.hpp"

namespace quickstep {

/// users.tsv: `<user>\t<group>\t<created date>`
struct UserAccount {
    std::string user;
    Group group = Group::flat;
    Date created_at;

    bool operator==(const UserAccount&) const = default;
};

/// browse.log: `<timestamp>\t<user>\t<url>\t<doc_id>`
struct BrowseRecord {
    Timestamp at;
    std::string user;
    std::string url;
    std::string doc_id;

    bool operator==(const BrowseRecord&) const = default;
};

/// docs.tsv: `<doc_id>\t<url>\t<registered date>`; the text lives in docs/<doc_id>.txt
struct DocumentRecord {
    std::string doc_id;
    std::string url;
    Date registered;

    bool operator==(const DocumentRecord&) const = default;
};

/// training.<group>.tsv: `<doc_id>\t<topic>\t<source>\t<date>`
struct TrainingRecord {
    std::string doc_id;
    TopicId topic;
    ExampleSource source = ExampleSource::bootstrap;
    Date added_at;

    bool operator==(const TrainingRecord&) const = default;
};

enum class Phase { nightly, daily };
std::string_view to_string(Phase p);
Phase parse_phase(std::string_view s);

/// cycles.log: `<date>\t<phase>`
struct CycleRecord {
    Date date;
    Phase phase = Phase::nightly;

    bool operator==(const CycleRecord&) const = default;
};

/// served.log: `<user>\t<set date>\t<first served at>`
struct ServedRecord {
    std::string user;
    Date set_date;
    Timestamp at;

    bool operator==(const ServedRecord&) const = default;
};

std::string format_user(const UserAccount& r);
UserAccount parse_user(std::string_view line);
std::string format_browse(const BrowseRecord& r);
BrowseRecord parse_browse(std::string_view line);
std::string format_document(const DocumentRecord& r);
DocumentRecord parse_document(std::string_view line);
std::string format_training(const TrainingRecord& r);
TrainingRecord parse_training(std::string_view line);
std::string format_cycle(const CycleRecord& r);
CycleRecord parse_cycle(std::string_view line);
std::string format_served(const ServedRecord& r);
ServedRecord parse_served(std::string_view line);

template <auto Format, auto Parse>
struct LineCodec {
    template <class R>
    static std::string format(const R& r)
    {
        return Format(r);
    }
    static auto parse(std::string_view line) { return Parse(line); }
};

using UserCollection = Collection<UserAccount, LineCodec<format_user, parse_user>>;
using BrowseCollection = Collection<BrowseRecord, LineCodec<format_browse, parse_browse>>;
using DocumentCollection = Collection<DocumentRecord, LineCodec<format_document, parse_document>>;
using TrainingCollection = Collection<TrainingRecord, LineCodec<format_training, parse_training>>;
using CycleCollection = Collection<CycleRecord, LineCodec<format_cycle, parse_cycle>>;
using ServedCollection = Collection<ServedRecord, LineCodec<format_served, parse_served>>;
using EventCollection = Collection<FeedbackEvent, LineCodec<format_event, parse_event>>;
using ClassifiedCollection = Collection<ClassifiedPaper, LineCodec<format_classified, parse_classified>>;
using RecommendationCollection =
    Collection<RecommendationRecord, LineCodec<format_recommendation, parse_recommendation>>;

/// Stable document id for a URL.
std::string doc_id_for_url(std::string_view url);

}  // namespace quickstep
