#include "quickstep/service.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>

namespace quickstep {

namespace fs = std::filesystem;

namespace {

std::string taxonomy_file(Group g)
{
    return "taxonomy." + std::string(to_string(g)) + ".tsv";
}

std::string training_file(Group g)
{
    return "training." + std::string(to_string(g)) + ".tsv";
}

std::string url_path(std::string_view url)
{
    const auto cut = url.find_first_of("?#");
    return std::string(url.substr(0, cut));
}

}  // namespace

std::string LocalFileFetcher::fetch(const std::string& url)
{
    fs::path path;
    if (url.starts_with("file://")) {
        path = url_path(url.substr(7));
    } else {
        const auto p = url_path(url);
        const auto slash = p.find_last_of('/');
        const auto name = slash == std::string::npos ? p : p.substr(slash + 1);
        if (name.empty() || name == "." || name == "..") {
            throw FetchError("cannot map '" + url + "' to a local file");
        }
        path = root_ / name;
        if (!fs::exists(path)) {
            path += ".txt";
        }
    }
    if (!fs::is_regular_file(path)) {
        throw FetchError("document unreachable: " + url);
    }
    return read_file(path);
}

std::string MapFetcher::fetch(const std::string& url)
{
    const auto it = texts_.find(url);
    if (it == texts_.end()) {
        throw FetchError("document unreachable: " + url);
    }
    return it->second;
}

FeedbackKind parse_feedback_kind(std::string_view s)
{
    if (s == "interesting") {
        return FeedbackKind::interesting;
    }
    if (s == "not_interesting") {
        return FeedbackKind::not_interesting;
    }
    if (s == "jump") {
        return FeedbackKind::jump;
    }
    if (s == "correction") {
        return FeedbackKind::correction;
    }
    throw InvalidRequest("unknown feedback kind '" + std::string(s) + "'");
}

struct Service::Files {
    Files(const fs::path& root, bool durable)
        : users(root / "users.tsv", durable),
          browse(root / "browse.log", durable),
          documents(root / "docs.tsv", durable),
          flat_training(root / training_file(Group::flat), durable),
          ontology_training(root / training_file(Group::ontology), durable),
          flat_taxonomy(root / taxonomy_file(Group::flat), durable),
          ontology_taxonomy(root / taxonomy_file(Group::ontology), durable),
          events(root / "events.log", durable),
          classified(root / "classified.tsv", durable),
          recommendations(root / "recommendations.log", durable),
          cycles(root / "cycles.log", durable),
          served(root / "served.log", durable)
    {
    }

    TrainingCollection& training(Group g) { return g == Group::flat ? flat_training : ontology_training; }
    LineLog& taxonomy(Group g) { return g == Group::flat ? flat_taxonomy : ontology_taxonomy; }

    UserCollection users;
    BrowseCollection browse;
    DocumentCollection documents;
    TrainingCollection flat_training;
    TrainingCollection ontology_training;
    LineLog flat_taxonomy;
    LineLog ontology_taxonomy;
    EventCollection events;
    ClassifiedCollection classified;
    RecommendationCollection recommendations;
    CycleCollection cycles;
    ServedCollection served;
};

void Service::initialize(const fs::path& root, const Taxonomy& flat, const Taxonomy& ontology)
{
    if (flat.mode() != TaxonomyMode::flat || ontology.mode() != TaxonomyMode::hierarchical) {
        throw InvalidRequest("initialize needs a flat and a hierarchical taxonomy");
    }
    fs::create_directories(root / "docs");
    for (const auto& [g, t] : {std::pair{Group::flat, &flat}, std::pair{Group::ontology, &ontology}}) {
        const auto path = root / taxonomy_file(g);
        if (!fs::exists(path)) {
            write_file_atomic(path, t->serialize());
        }
    }
}

Service::Service(fs::path root, Config config, std::unique_ptr<Fetcher> fetcher, Clock clock)
    : root_(std::move(root)),
      config_(std::move(config)),
      fetcher_(std::move(fetcher)),
      clock_(std::move(clock)),
      stoplist_(StopList::load(config_.stoplist_path)),
      suffixes_(config_.accepted_suffixes)
{
    for (const auto g : kAllGroups) {
        if (!fs::exists(root_ / taxonomy_file(g))) {
            throw NotFoundError(root_.string() + " is not a data root (missing " + taxonomy_file(g) + ")");
        }
    }
    fs::create_directories(root_ / "docs");
    files_ = std::make_unique<Files>(root_, config_.fsync);
    auto& f = *files_;

    for (const auto g : kAllGroups) {
        taxonomies_.emplace(g, load_taxonomy(root_ / taxonomy_file(g), mode_of(g)));
        training_[g].group = g;
    }
    for (const auto& u : f.users.records()) {
        users_[u.user] = u;
        user_groups_[u.user] = u.group;
    }
    for (const auto& d : f.documents.records()) {
        documents_[d.doc_id] = d;
    }
    for (const auto g : kAllGroups) {
        for (const auto& r : f.training(g).records()) {
            training_[g] = add_example(std::move(training_[g]), vector_of(r.doc_id), r.topic, r.source, r.added_at,
                taxonomies_.at(g));
        }
    }
    for (const auto& b : f.browse.records()) {
        if (browsed_doc_set_.insert(b.doc_id).second) {
            browsed_docs_.push_back(b.doc_id);
        }
        seen_docs_[b.user].insert(b.doc_id);
    }
    for (const auto& e : f.events.records()) {
        if (events_.append(e)) {
            events_by_user_[e.user].push_back(e);
            if (e.paper) {
                if (e.kind == EventKind::browsed) {
                    browse_events_.insert({e.user, e.at.seconds, *e.paper});
                }
                if (e.kind == EventKind::browsed || e.kind == EventKind::jump ||
                    e.kind == EventKind::recommended_seen) {
                    seen_docs_[e.user].insert(*e.paper);
                }
            }
        }
    }
    for (const auto& c : f.classified.records()) {
        classified_.upsert(c);
    }
    for (const auto& r : f.recommendations.records()) {
        apply_recommendation(r);
    }
    cycles_ = f.cycles.records();
    for (const auto& s : f.served.records()) {
        served_.insert({s.user, s.set_date});
    }
}

Service::~Service() = default;

void Service::on_event(std::function<void(const FeedbackEvent&)> listener)
{
    std::unique_lock lock(mutex_);
    listeners_.push_back(std::move(listener));
}

const UserAccount& Service::require_user(const std::string& user) const
{
    const auto it = users_.find(user);
    if (it == users_.end()) {
        throw NotFoundError("unknown user '" + user + "'");
    }
    return it->second;
}

UserAccount Service::create_user(const std::string& user, Group group)
{
    std::unique_lock lock(mutex_);
    if (users_.count(user)) {
        throw InvalidRequest("user '" + user + "' already exists");
    }
    UserAccount account{user, group, clock_().date()};
    files_->users.append(account);
    users_[user] = account;
    user_groups_[user] = group;
    return account;
}

std::optional<UserAccount> Service::user(const std::string& user) const
{
    std::shared_lock lock(mutex_);
    const auto it = users_.find(user);
    return it == users_.end() ? std::nullopt : std::optional(it->second);
}

std::vector<UserAccount> Service::users() const
{
    std::shared_lock lock(mutex_);
    std::vector<UserAccount> out;
    for (const auto& [id, u] : users_) {
        out.push_back(u);
    }
    return out;
}

std::string Service::register_document(const std::string& url, const std::optional<std::string>& text)
{
    if (!is_clean_field(url)) {
        throw InvalidRequest("url must be a non-empty single-line string");
    }
    const auto id = doc_id_for_url(url);
    if (documents_.count(id)) {
        return id;
    }
    const auto body = text ? *text : fetcher_ ? fetcher_->fetch(url) : throw FetchError("no fetch adapter for " + url);
    write_file_atomic(root_ / "docs" / (id + ".txt"), body, WriteOptions{config_.fsync, std::nullopt});
    DocumentRecord record{id, url, clock_().date()};
    files_->documents.append(record);
    documents_[id] = record;
    return id;
}

const TermVector& Service::vector_of(const std::string& doc_id)
{
    if (const auto it = vectors_.find(doc_id); it != vectors_.end()) {
        return it->second;
    }
    if (!documents_.count(doc_id)) {
        throw NotFoundError("unknown document '" + doc_id + "'");
    }
    auto v = build_vector(doc_id, read_file(root_ / "docs" / (doc_id + ".txt")), stoplist_);
    return vectors_.emplace(doc_id, std::move(v)).first->second;
}

bool Service::append_event(const FeedbackEvent& e)
{
    if (events_.contains(e)) {
        return false;
    }
    EventLog scratch;
    record_event(scratch, e, taxonomies_.at(e.group), user_groups_);  // validation only
    files_->events.append(e);
    events_.append(e);
    events_by_user_[e.user].push_back(e);
    if (e.paper) {
        if (e.kind == EventKind::browsed) {
            browse_events_.insert({e.user, e.at.seconds, *e.paper});
        }
        if (e.kind == EventKind::browsed || e.kind == EventKind::jump || e.kind == EventKind::recommended_seen) {
            seen_docs_[e.user].insert(*e.paper);
        }
    }
    for (const auto& l : listeners_) {
        l(e);
    }
    return true;
}

IngestReport Service::ingest_browse_log(const std::vector<BrowseLogEntry>& entries)
{
    std::unique_lock lock(mutex_);
    IngestReport report;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        try {
            require_user(e.user);
            if (!is_clean_field(e.url)) {
                throw InvalidRequest("url must be a non-empty single-line string");
            }
            if (!suffixes_.accepts(e.url)) {
                ++report.filtered;
                continue;
            }
            const auto id = register_document(e.url, e.text);
            files_->browse.append(BrowseRecord{e.at, e.user, e.url, id});
            if (browsed_doc_set_.insert(id).second) {
                browsed_docs_.push_back(id);
            }
            seen_docs_[e.user].insert(id);
            ++report.accepted;
        } catch (const Error& err) {
            report.errors.push_back({i, err.what()});
        }
    }
    return report;
}

std::optional<Date> Service::latest_daily(Date on_or_before) const
{
    std::optional<Date> best;
    for (const auto& c : cycles_) {
        if (c.phase == Phase::daily && c.date <= on_or_before && (!best || c.date > *best)) {
            best = c.date;
        }
    }
    return best;
}

ServedSet Service::serve_recommendations(const std::string& user, bool preview)
{
    std::unique_lock lock(mutex_);
    const auto& account = require_user(user);
    const auto now = clock_();
    const auto day = latest_daily(now.date());
    if (!day) {
        throw NoRecommendations("no recommendation set has been computed yet");
    }
    ServedSet out;
    const Key key{user, *day};
    if (const auto it = sets_.find(key); it != sets_.end()) {
        out.set = it->second;
    } else {
        out.set = RecommendationSet{user, account.group, *day, {}};
    }
    if (preview || served_.count(key)) {
        return out;
    }
    for (const auto& item : out.set.items) {
        append_event({now, user, EventKind::recommended_seen, item.topic, item.doc_id, account.group});
    }
    files_->served.append(ServedRecord{user, *day, now});
    served_.insert(key);
    out.first_view = true;
    return out;
}

bool Service::submit_feedback(const std::string& user, const std::string& doc_id, FeedbackKind kind,
    const std::optional<TopicId>& corrected_topic)
{
    std::unique_lock lock(mutex_);
    const auto& account = require_user(user);
    const auto rec = recommended_on_.find(user);
    if (rec == recommended_on_.end() || !rec->second.count(doc_id)) {
        throw NotFoundError("paper '" + doc_id + "' was never recommended to '" + user + "'");
    }
    const auto* paper = classified_.find(doc_id, account.group);
    if (paper == nullptr) {
        throw NotFoundError("paper '" + doc_id + "' has no classification");
    }
    FeedbackEvent e{clock_(), user, EventKind::browsed, paper->topic, doc_id, account.group};
    switch (kind) {
    case FeedbackKind::interesting:
        e.kind = EventKind::rated_interesting;
        break;
    case FeedbackKind::not_interesting:
        e.kind = EventKind::rated_not_interesting;
        break;
    case FeedbackKind::jump:
        e.kind = EventKind::jump;
        break;
    case FeedbackKind::correction:
        if (!corrected_topic) {
            throw InvalidRequest("a correction needs corrected_topic");
        }
        if (!taxonomies_.at(account.group).contains(*corrected_topic) ||
            *corrected_topic == taxonomies_.at(account.group).root()) {
            throw NotFoundError("topic '" + *corrected_topic + "' is not in the " +
                std::string(to_string(account.group)) + " taxonomy");
        }
        e.kind = EventKind::correction;
        e.topic = *corrected_topic;
        break;
    }
    if (events_.contains(e)) {
        return false;
    }
    append_event(e);
    if (kind == FeedbackKind::correction) {
        append_example(account.group, doc_id, *corrected_topic, ExampleSource::correction);
    }
    return true;
}

ExampleReceipt Service::append_example(Group group, const std::string& doc_id, const TopicId& topic,
    ExampleSource source)
{
    const auto& taxonomy = taxonomies_.at(group);
    if (!taxonomy.contains(topic) || topic == taxonomy.root()) {
        throw NotFoundError("topic '" + topic + "' is not in the " + std::string(to_string(group)) + " taxonomy");
    }
    const auto& vector = vector_of(doc_id);
    TrainingRecord record{doc_id, topic, source, clock_().date()};
    files_->training(group).append(record);
    training_[group] = add_example(std::move(training_[group]), vector, topic, source, record.added_at, taxonomy);
    return {doc_id, topic, group, training_[group].size()};
}

ExampleReceipt Service::submit_example(const std::string& user, const std::string& url_or_doc_id,
    const TopicId& topic, const std::optional<std::string>& text)
{
    std::unique_lock lock(mutex_);
    const auto group = require_user(user).group;
    const auto& taxonomy = taxonomies_.at(group);
    if (!taxonomy.contains(topic) || topic == taxonomy.root()) {
        throw NotFoundError("topic '" + topic + "' is not in the " + std::string(to_string(group)) + " taxonomy");
    }
    const auto doc_id = documents_.count(url_or_doc_id) ? url_or_doc_id : register_document(url_or_doc_id, text);
    return append_example(group, doc_id, topic, ExampleSource::user_added);
}

ExampleReceipt Service::add_training_example(Group group, const std::string& url, const std::string& text,
    const TopicId& topic, ExampleSource source)
{
    std::unique_lock lock(mutex_);
    const auto& taxonomy = taxonomies_.at(group);
    if (!taxonomy.contains(topic) || topic == taxonomy.root()) {
        throw NotFoundError("topic '" + topic + "' is not in the " + std::string(to_string(group)) + " taxonomy");
    }
    const auto doc_id = register_document(url, text);
    return append_example(group, doc_id, topic, source);
}

TopicNode Service::add_topic(Group group, const std::string& label, const std::optional<TopicId>& parent)
{
    std::unique_lock lock(mutex_);
    if (group != Group::flat) {
        throw InvalidRequest("the ontology group's taxonomy is fixed");
    }
    auto next = taxonomies_.at(group).add_topic(label, parent);
    const auto node = next.nodes().back();
    files_->taxonomy(group).append(format_taxonomy_line(node));
    taxonomies_.insert_or_assign(group, std::move(next));
    return node;
}

Taxonomy Service::taxonomy(Group group) const
{
    std::shared_lock lock(mutex_);
    return taxonomies_.at(group);
}

std::size_t Service::training_size(Group group) const
{
    std::shared_lock lock(mutex_);
    return training_.at(group).size();
}

std::vector<FeedbackEvent> Service::events() const
{
    std::shared_lock lock(mutex_);
    return events_.events();
}

std::optional<ClassifiedPaper> Service::classification(const std::string& doc_id, Group group) const
{
    std::shared_lock lock(mutex_);
    const auto* p = classified_.find(doc_id, group);
    return p ? std::optional(*p) : std::nullopt;
}

std::optional<std::string> Service::document_url(const std::string& doc_id) const
{
    std::shared_lock lock(mutex_);
    const auto it = documents_.find(doc_id);
    return it == documents_.end() ? std::nullopt : std::optional(it->second.url);
}

InterestProfile Service::profile(const std::string& user, Date now) const
{
    std::shared_lock lock(mutex_);
    const auto& account = require_user(user);
    const auto it = events_by_user_.find(user);
    const std::span<const FeedbackEvent> events =
        it == events_by_user_.end() ? std::span<const FeedbackEvent>() : std::span<const FeedbackEvent>(it->second);
    return compute_profile(events, taxonomies_.at(account.group), user, now, config_.profile);
}

void Service::apply_recommendation(const RecommendationRecord& r)
{
    const Key key{r.user, r.paper.classified_at};
    auto& set = sets_[key];
    set.user = r.user;
    set.group = r.paper.group;
    set.date = r.paper.classified_at;
    set.items.push_back({r.paper.doc_id, r.paper.topic, r.paper.confidence, r.score, r.rank});
    auto& dates = recommended_on_[r.user][r.paper.doc_id];
    if (dates.empty() || dates.back() != set.date) {
        dates.push_back(set.date);
    }
}

std::set<std::string> Service::seen_by(const std::string& user, Date day) const
{
    std::set<std::string> seen;
    if (const auto it = seen_docs_.find(user); it != seen_docs_.end()) {
        seen = it->second;
    }
    if (const auto it = recommended_on_.find(user); it != recommended_on_.end()) {
        for (const auto& [doc, dates] : it->second) {
            const auto before = std::lower_bound(dates.begin(), dates.end(), day);
            if (before == dates.begin()) {
                continue;
            }
            const auto last = *std::prev(before);
            if (!config_.recommendation_cooldown_days || day - last < *config_.recommendation_cooldown_days) {
                seen.insert(doc);
            }
        }
    }
    return seen;
}

CycleReport Service::run_cycle(Phase phase, Date as_of)
{
    std::unique_lock lock(mutex_);
    for (const auto& c : cycles_) {
        if (c.date > as_of) {
            throw PhaseOrderError("a cycle for " + c.date.str() + " already ran; cannot run " + as_of.str());
        }
        if (c.date == as_of && c.phase == Phase::daily) {
            throw PhaseOrderError("the daily phase for " + as_of.str() + " already ran");
        }
    }
    return phase == Phase::nightly ? run_nightly(as_of) : run_daily(as_of);
}

CycleReport Service::run_nightly(Date as_of)
{
    CycleReport report;
    report.phase = Phase::nightly;
    report.as_of = as_of;
    std::map<Group, BoostedCommittee> committees;
    for (const auto g : kAllGroups) {
        auto& summary = report.training[g];
        const auto& set = training_.at(g);
        summary.examples = set.size();
        if (set.empty() || !ExampleIndex(set).has_usable_example()) {
            continue;
        }
        auto committee = train_boost(set, config_.boost_rounds, config_.boost_seed, config_.k);
        std::ostringstream out;
        save_committee(committee, out);
        write_file_atomic(root_ / ("committee." + std::string(to_string(g)) + ".txt"), out.str(),
            WriteOptions{config_.fsync, std::nullopt});
        summary.trained = true;
        summary.rounds_completed = committee.rounds_completed;
        committees.emplace(g, std::move(committee));
    }

    std::map<Group, const BoostedCommittee*> active;
    for (const auto& [g, c] : committees) {
        active.emplace(g, &c);
    }
    std::vector<RawDocument> pending;
    for (const auto& id : browsed_docs_) {
        const bool missing = std::any_of(std::begin(kAllGroups), std::end(kAllGroups),
            [&](Group g) { return !classified_.contains(id, g); });
        if (missing) {
            pending.push_back({id, documents_.at(id).url, read_file(root_ / "docs" / (id + ".txt")), as_of});
        }
    }
    report.pending = pending.size();
    const auto result = nightly_classify(pending, active, classified_, stoplist_, as_of);
    files_->classified.append_all(result.classified);
    report.classified = result.classified.size();
    report.retried = result.retry.size();

    // Browses become events once their document has a topic in the user's group.
    for (const auto& b : files_->browse.records()) {
        if (browse_events_.count({b.user, b.at.seconds, b.doc_id})) {
            continue;
        }
        const auto group = users_.at(b.user).group;
        const auto* paper = classified_.find(b.doc_id, group);
        if (paper == nullptr) {
            continue;
        }
        if (append_event({b.at, b.user, EventKind::browsed, paper->topic, b.doc_id, group})) {
            ++report.browsed_events;
        }
    }
    const CycleRecord done{as_of, Phase::nightly};
    files_->cycles.append(done);
    cycles_.push_back(done);
    return report;
}

CycleReport Service::run_daily(Date as_of)
{
    const bool nightly_done = std::any_of(cycles_.begin(), cycles_.end(),
        [&](const CycleRecord& c) { return c.date == as_of && c.phase == Phase::nightly; });
    if (!nightly_done) {
        throw PhaseOrderError("the nightly phase for " + as_of.str() + " has not run");
    }
    CycleReport report;
    report.phase = Phase::daily;
    report.as_of = as_of;
    std::vector<RecommendationRecord> records;
    for (const auto& [id, account] : users_) {
        const auto it = events_by_user_.find(id);
        const std::span<const FeedbackEvent> events =
            it == events_by_user_.end() ? std::span<const FeedbackEvent>() : std::span<const FeedbackEvent>(it->second);
        const auto prof = compute_profile(events, taxonomies_.at(account.group), id, as_of, config_.profile);
        ++report.profiles;
        const auto set = daily_recommend(prof, account.group, classified_, seen_by(id, as_of),
            config_.n_recommendations, config_.n_topics);
        for (auto& r : to_records(set)) {
            records.push_back(std::move(r));
        }
    }
    files_->recommendations.append_all(records);
    for (const auto& r : records) {
        apply_recommendation(r);
    }
    report.recommendations = records.size();
    const CycleRecord done{as_of, Phase::daily};
    files_->cycles.append(done);
    cycles_.push_back(done);
    return report;
}

}  // namespace quickstep
