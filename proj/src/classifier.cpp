#include "quickstep/classifier.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace quickstep {

std::string_view to_string(ExampleSource s)
{
    switch (s) {
    case ExampleSource::bootstrap:
        return "bootstrap";
    case ExampleSource::user_added:
        return "user-added";
    case ExampleSource::correction:
        return "correction";
    }
    return "bootstrap";
}

ExampleSource parse_example_source(std::string_view s)
{
    if (s == "bootstrap") {
        return ExampleSource::bootstrap;
    }
    if (s == "user-added") {
        return ExampleSource::user_added;
    }
    if (s == "correction") {
        return ExampleSource::correction;
    }
    throw ParseError("unknown example source '" + std::string(s) + "'");
}

TrainingSet add_example(TrainingSet set, TermVector vector, const TopicId& topic, ExampleSource source, Date added_at,
    const Taxonomy& taxonomy)
{
    if (!taxonomy.contains(topic)) {
        throw NotFoundError("unknown topic '" + topic + "' for the " + std::string(to_string(set.group)) + " group");
    }
    set.examples.push_back(TrainingExample{std::move(vector), topic, source, added_at});
    return set;
}

ExampleIndex::ExampleIndex(const TrainingSet& set)
{
    std::set<std::string_view> stems;
    for (const auto& ex : set.examples) {
        for (const auto& e : ex.vector.entries()) {
            stems.insert(e.first);
        }
    }
    std::uint32_t next = 0;
    for (const auto s : stems) {
        vocab_.emplace(std::string(s), next++);
    }
    postings_.resize(vocab_.size());
    terms_.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& ex = set.examples[i];
        std::vector<std::pair<std::uint32_t, double>> terms;
        terms.reserve(ex.vector.size());
        for (const auto& [s, w] : ex.vector.entries()) {
            const auto id = vocab_.at(s);
            terms.emplace_back(id, w);
            postings_[id].push_back(Posting{static_cast<std::uint32_t>(i), w});
        }
        terms_.push_back(std::move(terms));
        norms_.push_back(ex.vector.squared_norm());
        topics_.push_back(ex.topic);
        doc_ids_.push_back(ex.vector.doc_id());
    }
}

bool ExampleIndex::has_usable_example() const
{
    return std::any_of(norms_.begin(), norms_.end(), [](double n) { return n > 0.0; });
}

std::vector<double> ExampleIndex::accumulate(
    const std::vector<std::pair<std::uint32_t, double>>& terms, double norm) const
{
    std::vector<double> dot(size(), 0.0);
    for (const auto& [id, w] : terms) {
        for (const auto& p : postings_[id]) {
            dot[p.example] += w * p.weight;
        }
    }
    for (std::size_t i = 0; i < dot.size(); ++i) {
        if (norm == 0.0 || norms_[i] == 0.0) {
            dot[i] = 0.0;
            continue;
        }
        dot[i] = std::clamp(dot[i] / std::sqrt(norm * norms_[i]), 0.0, 1.0);
    }
    return dot;
}

std::vector<double> ExampleIndex::similarities(const TermVector& query) const
{
    std::vector<std::pair<std::uint32_t, double>> terms;
    terms.reserve(query.size());
    for (const auto& [s, w] : query.entries()) {
        if (const auto it = vocab_.find(s); it != vocab_.end()) {
            terms.emplace_back(it->second, w);
        }
    }
    return accumulate(terms, query.squared_norm());
}

std::vector<double> ExampleIndex::similarities_of(std::size_t i) const
{
    return accumulate(terms_.at(i), norms_.at(i));
}

std::vector<Neighbour> nearest(const std::vector<double>& similarities, int k, std::size_t exclude)
{
    std::vector<Neighbour> candidates;
    for (std::size_t i = 0; i < similarities.size(); ++i) {
        if (i != exclude && similarities[i] > 0.0) {
            candidates.push_back(Neighbour{i, similarities[i]});
        }
    }
    const auto closer = [](const Neighbour& a, const Neighbour& b) {
        return a.similarity != b.similarity ? a.similarity > b.similarity : a.index < b.index;
    };
    const auto take = std::min(candidates.size(), static_cast<std::size_t>(std::max(k, 0)));
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
        closer);
    candidates.resize(take);
    return candidates;
}

namespace {

Ranking rank_votes(const std::map<TopicId, double>& votes, double total)
{
    Ranking out;
    for (const auto& [topic, mass] : votes) {
        if (mass > 0.0) {
            out.push_back(TopicScore{topic, mass / total});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const TopicScore& a, const TopicScore& b) {
        return a.confidence != b.confidence ? a.confidence > b.confidence : a.topic < b.topic;
    });
    return out;
}

}  // namespace

Ranking weighted_vote(const std::vector<Neighbour>& neighbours, const std::vector<double>& weights,
    const ExampleIndex& index)
{
    std::map<TopicId, double> votes;
    double total = 0.0;
    for (const auto& n : neighbours) {
        const double v = weights[n.index] * n.similarity;
        votes[index.topic(n.index)] += v;
        total += v;
    }
    if (!(total > 0.0)) {
        throw Unclassifiable();
    }
    return rank_votes(votes, total);
}

KnnModel::KnnModel(std::shared_ptr<const ExampleIndex> index, int k, std::vector<double> instance_weights)
    : index_(std::move(index))
    , k_(k)
    , weights_(std::move(instance_weights))
{
    if (!index_ || index_->size() == 0) {
        throw InvalidRequest("nearest-neighbour model needs at least one example");
    }
    if (k_ < 1) {
        throw InvalidRequest("k must be at least 1");
    }
    if (weights_.size() != index_->size()) {
        throw InvalidRequest("one instance weight per example required");
    }
    for (const double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw InvalidRequest("instance weights must be finite and non-negative");
        }
    }
}

KnnModel KnnModel::uniform(std::shared_ptr<const ExampleIndex> index, int k)
{
    const auto m = index ? index->size() : 0;
    return KnnModel(std::move(index), k, std::vector<double>(m, m == 0 ? 0.0 : 1.0 / static_cast<double>(m)));
}

Ranking knn_classify(const KnnModel& model, const TermVector& query)
{
    if (!model.index().has_usable_example()) {
        throw InvalidRequest("every training example has an empty vector");
    }
    const auto sims = model.index().similarities(query);
    return weighted_vote(nearest(sims, model.k()), model.instance_weights(), model.index());
}

namespace {

std::vector<double> canonical_weights(const std::vector<double>& d)
{
    std::vector<double> out(d.size());
    std::transform(d.begin(), d.end(), out.begin(), [](double w) { return round_significant(w, kWeightDigits); });
    return out;
}

double sum(const std::vector<double>& v)
{
    double s = 0.0;
    for (const double x : v) {
        s += x;
    }
    return s;
}

}  // namespace

BoostedCommittee train_boost(const TrainingSet& set, int rounds, std::uint64_t seed, int k)
{
    if (set.empty()) {
        throw InvalidRequest("cannot train on an empty training set");
    }
    if (rounds < 1) {
        throw InvalidRequest("boosting needs at least one round");
    }
    auto index = std::make_shared<const ExampleIndex>(set);
    if (!index->has_usable_example()) {
        throw InvalidRequest("every training example has an empty vector");
    }
    const std::size_t m = index->size();

    // Neighbour sets do not depend on the instance weights, so they are found once.
    std::vector<std::vector<Neighbour>> neighbours(m);
    for (std::size_t i = 0; i < m; ++i) {
        neighbours[i] = nearest(index->similarities_of(i), k, i);
    }

    BoostedCommittee committee;
    committee.group = set.group;
    committee.k = k;
    committee.rounds_requested = rounds;
    committee.seed = seed;

    std::vector<double> dist(m, 1.0 / static_cast<double>(m));
    std::vector<bool> correct(m);
    for (int t = 1; t <= rounds; ++t) {
        std::vector<double> weights = canonical_weights(dist);
        double error = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            try {
                correct[i] = weighted_vote(neighbours[i], weights, *index).front().topic == index->topic(i);
            } catch (const Unclassifiable&) {
                correct[i] = false;
            }
            if (!correct[i]) {
                error += weights[i];
            }
        }
        const double weight_sum = sum(weights);
        // An error within rounding of 1/2 means the member repeats an earlier one.
        if (error >= 0.5 - 1e-9) {
            committee.trace.push_back(BoostRound{t, error, weight_sum, false});
            if (committee.members.empty()) {
                committee.members.push_back(CommitteeMember{KnnModel(index, k, std::move(weights)), 1.0, error});
                committee.rounds_completed = 1;
                committee.base_learner_fallback = true;
            }
            break;
        }
        const bool perfect = error == 0.0;
        if (perfect) {
            error = kErrorFloor;
        }
        const double beta = error / (1.0 - error);
        committee.trace.push_back(BoostRound{t, error, weight_sum, true});
        committee.members.push_back(CommitteeMember{KnnModel(index, k, weights), std::log(1.0 / beta), error});
        committee.rounds_completed = t;
        if (perfect) {
            break;
        }
        for (std::size_t i = 0; i < m; ++i) {
            dist[i] = correct[i] ? weights[i] * beta : weights[i];
        }
        const double total = sum(dist);
        for (auto& w : dist) {
            w /= total;
        }
    }
    return committee;
}

Ranking classify(const BoostedCommittee& committee, const TermVector& query)
{
    if (committee.members.empty()) {
        throw InvalidRequest("committee has no members");
    }
    const auto& index = committee.members.front().model.index();
    const auto neighbours = nearest(index.similarities(query), committee.k);
    std::map<TopicId, double> votes;
    double total = 0.0;
    for (const auto& member : committee.members) {
        try {
            const auto ranking = weighted_vote(neighbours, member.model.instance_weights(), index);
            votes[ranking.front().topic] += member.vote_weight;
            total += member.vote_weight;
        } catch (const Unclassifiable&) {
            // abstain
        }
    }
    if (!(total > 0.0)) {
        throw Unclassifiable();
    }
    return rank_votes(votes, total);
}

std::vector<int> stratified_folds(const TrainingSet& set, int folds, std::uint64_t seed)
{
    if (folds < 2) {
        throw InvalidRequest("cross-validation needs at least 2 folds");
    }
    if (static_cast<std::size_t>(folds) > set.size()) {
        throw InvalidRequest("fold count " + std::to_string(folds) + " exceeds example count " +
            std::to_string(set.size()));
    }
    std::map<TopicId, std::vector<std::size_t>> by_topic;
    for (std::size_t i = 0; i < set.size(); ++i) {
        by_topic[set.examples[i].topic].push_back(i);
    }
    Rng rng(seed);
    std::vector<int> fold(set.size(), 0);
    std::size_t dealt = 0;
    for (auto& [topic, members] : by_topic) {
        rng.shuffle(members);
        for (const auto i : members) {
            fold[i] = static_cast<int>(dealt++ % static_cast<std::size_t>(folds));
        }
    }
    return fold;
}

CrossValidation cross_validate(const TrainingSet& set, int folds, int rounds, std::uint64_t seed, int k)
{
    const auto fold = stratified_folds(set, folds, seed);
    CrossValidation cv;
    for (int f = 0; f < folds; ++f) {
        TrainingSet train{set.group, {}};
        std::vector<std::size_t> held;
        for (std::size_t i = 0; i < set.size(); ++i) {
            if (fold[i] == f) {
                held.push_back(i);
            } else {
                train.examples.push_back(set.examples[i]);
            }
        }
        std::optional<BoostedCommittee> committee;
        try {
            committee = train_boost(train, rounds, seed, k);
        } catch (const InvalidRequest&) {
            // nothing usable to learn from: every held-out example stays unclassified
        }
        for (const auto i : held) {
            ++cv.held_out;
            if (!committee) {
                continue;
            }
            const auto& truth = set.examples[i].topic;
            try {
                const auto ranking = classify(*committee, set.examples[i].vector);
                ++cv.classified;
                if (ranking.front().topic == truth) {
                    ++cv.rank1_correct;
                }
                if (std::any_of(ranking.begin(), ranking.end(), [&](const TopicScore& s) { return s.topic == truth; })) {
                    ++cv.in_ranking;
                }
            } catch (const Unclassifiable&) {
            }
        }
    }
    cv.precision = cv.classified == 0 ? 0.0 : static_cast<double>(cv.rank1_correct) / static_cast<double>(cv.classified);
    cv.recall = cv.held_out == 0 ? 0.0 : static_cast<double>(cv.in_ranking) / static_cast<double>(cv.held_out);
    return cv;
}

namespace {

std::string format_weight(double w)
{
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), w, std::chars_format::general, kWeightDigits);
    return std::string(buf.data(), end);
}

std::vector<std::string_view> expect_record(std::istream& in, std::string& line, std::string_view tag, std::size_t n)
{
    if (!std::getline(in, line)) {
        throw ParseError("committee file truncated before '" + std::string(tag) + "'");
    }
    auto fields = split(line, '\t');
    if (fields.empty() || fields[0] != tag || (n != 0 && fields.size() != n)) {
        throw ParseError("committee file: expected '" + std::string(tag) + "' record, got '" + line + "'");
    }
    return fields;
}

}  // namespace

void save_committee(const BoostedCommittee& committee, std::ostream& out)
{
    out << "quickstep-committee\t1\n";
    out << "group\t" << to_string(committee.group) << '\n';
    out << "k\t" << committee.k << '\n';
    out << "rounds\t" << committee.rounds_requested << '\t' << committee.rounds_completed << '\n';
    out << "seed\t" << committee.seed << '\n';
    out << "fallback\t" << (committee.base_learner_fallback ? 1 : 0) << '\n';
    const auto& index = committee.members.at(0).model.index();
    out << "examples\t" << index.size() << '\n';
    for (std::size_t i = 0; i < index.size(); ++i) {
        out << "x\t" << i << '\t' << index.doc_id(i) << '\t' << index.topic(i) << '\n';
    }
    out << "members\t" << committee.members.size() << '\n';
    for (const auto& m : committee.members) {
        out << "member\t" << format_double(m.vote_weight) << '\t' << format_double(m.error) << '\n';
        out << "w";
        for (const double w : m.model.instance_weights()) {
            out << '\t' << format_weight(w);
        }
        out << '\n';
    }
}

BoostedCommittee load_committee(std::istream& in, const TrainingSet& set)
{
    std::string line;
    auto header = expect_record(in, line, "quickstep-committee", 2);
    if (header[1] != "1") {
        throw ParseError("unsupported committee format version");
    }
    BoostedCommittee c;
    c.group = parse_group(expect_record(in, line, "group", 2)[1]);
    c.k = static_cast<int>(parse_int(expect_record(in, line, "k", 2)[1]));
    auto rounds = expect_record(in, line, "rounds", 3);
    c.rounds_requested = static_cast<int>(parse_int(rounds[1]));
    c.rounds_completed = static_cast<int>(parse_int(rounds[2]));
    c.seed = static_cast<std::uint64_t>(parse_int(expect_record(in, line, "seed", 2)[1]));
    c.base_learner_fallback = expect_record(in, line, "fallback", 2)[1] == "1";
    const auto n = static_cast<std::size_t>(parse_int(expect_record(in, line, "examples", 2)[1]));
    if (n != set.size()) {
        throw ParseError("committee was trained on " + std::to_string(n) + " examples, training set has " +
            std::to_string(set.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto x = expect_record(in, line, "x", 4);
        if (static_cast<std::size_t>(parse_int(x[1])) != i || x[2] != set.examples[i].vector.doc_id() ||
            x[3] != set.examples[i].topic) {
            throw ParseError("committee example " + std::to_string(i) + " does not match the training set");
        }
    }
    auto index = std::make_shared<const ExampleIndex>(set);
    const auto members = static_cast<std::size_t>(parse_int(expect_record(in, line, "members", 2)[1]));
    for (std::size_t j = 0; j < members; ++j) {
        auto mf = expect_record(in, line, "member", 3);
        const double vote = parse_double(mf[1]);
        const double error = parse_double(mf[2]);
        auto wf = expect_record(in, line, "w", n + 1);
        std::vector<double> weights;
        weights.reserve(n);
        for (std::size_t i = 1; i < wf.size(); ++i) {
            weights.push_back(parse_double(wf[i]));
        }
        c.members.push_back(CommitteeMember{KnnModel(index, c.k, std::move(weights)), vote, error});
    }
    if (c.members.empty()) {
        throw ParseError("committee has no members");
    }
    return c;
}

}  // namespace quickstep
