#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "quickstep/common.hpp"
#include "quickstep/taxonomy.hpp"
#include "quickstep/text.hpp"

namespace quickstep {

enum class ExampleSource { bootstrap, user_added, correction };

std::string_view to_string(ExampleSource s);
ExampleSource parse_example_source(std::string_view s);

struct TrainingExample {
    TermVector vector;
    TopicId topic;
    ExampleSource source = ExampleSource::bootstrap;
    Date added_at;
};

/// One group's labelled pool. Append-only; duplicates are kept.
struct TrainingSet {
    Group group = Group::flat;
    std::vector<TrainingExample> examples;

    std::size_t size() const { return examples.size(); }
    bool empty() const { return examples.empty(); }
};

/// Appends a labelled example; the topic must exist in `taxonomy`.
TrainingSet add_example(TrainingSet set, TermVector vector, const TopicId& topic, ExampleSource source, Date added_at,
    const Taxonomy& taxonomy);

/// No example shares a term with the query, or every neighbour carries zero weight.
class Unclassifiable : public Error {
public:
    Unclassifiable()
        : Error("document is unclassifiable")
    {
    }
};

struct TopicScore {
    TopicId topic;
    double confidence = 0.0;

    bool operator==(const TopicScore&) const = default;
};

/// Sorted by confidence descending, then topic id ascending.
using Ranking = std::vector<TopicScore>;

struct Neighbour {
    std::size_t index = 0;
    double similarity = 0.0;
};

/// Immutable view of a training set prepared for similarity search.
///
/// Stems are interned in lexicographic order, so every dot product is summed
/// in the same order as cosine() on the original vectors and the
/// similarities are bit-identical to it.
class ExampleIndex {
public:
    explicit ExampleIndex(const TrainingSet& set);

    std::size_t size() const { return topics_.size(); }
    const TopicId& topic(std::size_t i) const { return topics_[i]; }
    const std::string& doc_id(std::size_t i) const { return doc_ids_[i]; }
    bool has_usable_example() const;

    /// cosine(query, example i) for every i.
    std::vector<double> similarities(const TermVector& query) const;
    /// cosine(example i, example j) for every j.
    std::vector<double> similarities_of(std::size_t i) const;

private:
    struct Posting {
        std::uint32_t example;
        double weight;
    };

    std::vector<double> accumulate(const std::vector<std::pair<std::uint32_t, double>>& terms, double norm) const;

    std::unordered_map<std::string, std::uint32_t> vocab_;
    std::vector<std::vector<Posting>> postings_;  // by stem id
    std::vector<std::vector<std::pair<std::uint32_t, double>>> terms_;  // by example
    std::vector<double> norms_;
    std::vector<TopicId> topics_;
    std::vector<std::string> doc_ids_;
};

/// The k examples with the highest positive similarity, ties by index.
std::vector<Neighbour> nearest(const std::vector<double>& similarities, int k,
    std::size_t exclude = static_cast<std::size_t>(-1));

/// Instance-weighted nearest-neighbour vote; throws Unclassifiable.
Ranking weighted_vote(const std::vector<Neighbour>& neighbours, const std::vector<double>& weights,
    const ExampleIndex& index);

/// Nearest-neighbour learner over a shared example index.
class KnnModel {
public:
    KnnModel(std::shared_ptr<const ExampleIndex> index, int k, std::vector<double> instance_weights);
    /// Weights 1/m for each of the m examples.
    static KnnModel uniform(std::shared_ptr<const ExampleIndex> index, int k);

    int k() const { return k_; }
    const std::vector<double>& instance_weights() const { return weights_; }
    const ExampleIndex& index() const { return *index_; }
    const std::shared_ptr<const ExampleIndex>& shared_index() const { return index_; }

private:
    std::shared_ptr<const ExampleIndex> index_;
    int k_;
    std::vector<double> weights_;
};

Ranking knn_classify(const KnnModel& model, const TermVector& query);

struct CommitteeMember {
    KnnModel model;
    double vote_weight = 0.0;
    double error = 0.0;  // epsilon_t, after flooring
};

/// Per-round record of the boosting run, including a discarded final round.
struct BoostRound {
    int round = 0;
    double error = 0.0;
    double distribution_sum = 0.0;  // of the weights the round was scored with
    bool accepted = false;
};

struct BoostedCommittee {
    Group group = Group::flat;
    int k = 1;
    int rounds_requested = 0;
    int rounds_completed = 0;
    std::uint64_t seed = 0;
    std::vector<CommitteeMember> members;
    std::vector<BoostRound> trace;
    /// Set when the first round's error was already >= 0.5 and the unboosted
    /// learner was kept as the only member.
    bool base_learner_fallback = false;
};

inline constexpr double kErrorFloor = 1e-10;
inline constexpr int kWeightDigits = 12;

/// AdaBoost.M1 with instance-weighted kNN members scored leave-one-out.
BoostedCommittee train_boost(const TrainingSet& set, int rounds, std::uint64_t seed, int k = 1);

/// Weighted vote of the members' top-1 topics; abstaining members are skipped.
Ranking classify(const BoostedCommittee& committee, const TermVector& query);

struct CrossValidation {
    double precision = 0.0;
    double recall = 0.0;
    std::size_t held_out = 0;
    std::size_t classified = 0;
    std::size_t rank1_correct = 0;
    std::size_t in_ranking = 0;
};

/// Stratified k-fold estimate. Precision counts rank-1 hits over classified
/// examples; recall counts examples whose topic appears anywhere in the ranking.
CrossValidation cross_validate(const TrainingSet& set, int folds, int rounds, std::uint64_t seed, int k = 1);

/// Fold of each example; topics are dealt round-robin after a seeded shuffle.
std::vector<int> stratified_folds(const TrainingSet& set, int folds, std::uint64_t seed);

void save_committee(const BoostedCommittee& committee, std::ostream& out);
/// Rebuilds the committee over `set`, which must be the set it was trained on.
BoostedCommittee load_committee(std::istream& in, const TrainingSet& set);

}  // namespace quickstep
