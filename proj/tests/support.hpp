#pragma once

// Test-only helpers: independent oracles and synthetic data generators.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "quickstep/classifier.hpp"
#include "quickstep/common.hpp"
#include "quickstep/profiler.hpp"
#include "quickstep/taxonomy.hpp"
#include "quickstep/text.hpp"

namespace quickstep::testing {

using WeightMap = std::map<std::string, double>;

inline TermVector vec(const std::string& id, const WeightMap& m)
{
    return TermVector(id, m);
}

namespace oracle {

/// Cosine straight from the definition over ordered maps.
inline double cosine(const WeightMap& a, const WeightMap& b)
{
    if (a.empty() || b.empty()) {
        return 0.0;
    }
    double dot = 0.0;
    for (const auto& [stem, w] : a) {
        if (const auto it = b.find(stem); it != b.end()) {
            dot += w * it->second;
        }
    }
    double na = 0.0;
    for (const auto& kv : a) {
        na += kv.second * kv.second;
    }
    double nb = 0.0;
    for (const auto& kv : b) {
        nb += kv.second * kv.second;
    }
    return std::min(1.0, std::max(0.0, dot / std::sqrt(na * nb)));
}

struct LabelledMap {
    WeightMap weights;
    std::string topic;
};

/// O(m) scan: score every example, fully sort, keep the top k with positive
/// similarity, and vote. Returns an empty ranking when nothing votes.
inline std::vector<std::pair<std::string, double>> brute_force_knn(const std::vector<LabelledMap>& examples,
    const std::vector<double>& instance_weights, int k, const WeightMap& query)
{
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        scored.emplace_back(cosine(query, examples[i].weights), i);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) {
            return a.first > b.first;
        }
        return a.second < b.second;
    });
    std::map<std::string, double> votes;
    double total = 0.0;
    int taken = 0;
    for (const auto& [sim, i] : scored) {
        if (taken == k || sim <= 0.0) {
            break;
        }
        ++taken;
        const double v = instance_weights[i] * sim;
        votes[examples[i].topic] += v;
        total += v;
    }
    std::vector<std::pair<std::string, double>> ranking;
    if (!(total > 0.0)) {
        return ranking;
    }
    for (const auto& [topic, mass] : votes) {
        if (mass > 0.0) {
            ranking.emplace_back(topic, mass / total);
        }
    }
    std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });
    return ranking;
}

}  // namespace oracle

/// Random sparse vector over stems s00..s{vocab-1}.
inline WeightMap random_weights(Rng& rng, int vocab, int max_terms)
{
    WeightMap m;
    const auto n = 1 + rng.below(static_cast<std::uint64_t>(max_terms));
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto s = rng.below(static_cast<std::uint64_t>(vocab));
        m["s" + std::string(s < 10 ? "0" : "") + std::to_string(s)] = (1.0 + static_cast<double>(rng.below(8))) / 16.0;
    }
    return m;
}

/// Two topics with disjoint vocabularies: every example is trivially separable.
inline TrainingSet separable_set(int per_topic, Group group = Group::flat)
{
    TrainingSet set{group, {}};
    for (int i = 0; i < per_topic; ++i) {
        for (const char* topic : {"alpha", "beta"}) {
            WeightMap m;
            const std::string p = topic[0] == 'a' ? "a" : "b";
            m[p + "core"] = 0.4;
            m[p + "w" + std::to_string(i % 5)] = 0.2;
            m[p + "v" + std::to_string(i % 3)] = 0.1;
            set.examples.push_back(
                {vec(std::string(topic) + std::to_string(i), m), topic, ExampleSource::bootstrap, Date{}});
        }
    }
    return set;
}

/// Documents for the label-noise experiments: each topic has its own core
/// vocabulary, all topics share a noise vocabulary, and document text is a
/// mixture of the two. Vectors go through the real pipeline.
struct NoisyCorpus {
    TrainingSet train;
    std::vector<std::pair<TermVector, std::string>> test;  // clean labels
};

inline std::string noisy_document(Rng& rng, int topic, double core_share)
{
    std::string text;
    const auto length = rng.between(80, 200);
    for (long long i = 0; i < length; ++i) {
        if (rng.chance(core_share)) {
            text += "t" + std::to_string(topic) + "c" + std::to_string(rng.below(20));
        } else {
            text += "n" + std::to_string(rng.below(150));
        }
        text += ' ';
    }
    return text;
}

inline NoisyCorpus noisy_two_topic_corpus(std::uint64_t seed, int train_size = 120, int test_size = 200,
    double label_noise = 0.10, double core_share = 0.12)
{
    Rng rng(seed);
    const StopList none;
    const std::string topics[] = {"alpha", "beta"};
    NoisyCorpus c;
    c.train.group = Group::flat;
    for (int i = 0; i < train_size; ++i) {
        const int t = static_cast<int>(rng.below(2));
        const std::string id = "tr" + std::to_string(i);
        auto v = build_vector(id, noisy_document(rng, t, core_share), none);
        const int label = rng.chance(label_noise) ? 1 - t : t;
        c.train.examples.push_back({std::move(v), topics[label], ExampleSource::bootstrap, Date{}});
    }
    for (int i = 0; i < test_size; ++i) {
        const int t = static_cast<int>(rng.below(2));
        c.test.emplace_back(build_vector("te" + std::to_string(i), noisy_document(rng, t, core_share), none), topics[t]);
    }
    return c;
}

inline double accuracy(const BoostedCommittee& committee, const std::vector<std::pair<TermVector, std::string>>& test)
{
    std::size_t hits = 0;
    for (const auto& [v, truth] : test) {
        try {
            if (classify(committee, v).front().topic == truth) {
                ++hits;
            }
        } catch (const Unclassifiable&) {
        }
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

/// Events of every kind for one user on random topics over `span_days` days
/// ending at `end`, in time order.
inline std::vector<FeedbackEvent> random_event_log(Rng& rng, const Taxonomy& taxonomy, const std::string& user,
    Group group, int events, Date end, int span_days)
{
    static constexpr EventKind kinds[] = {EventKind::browsed, EventKind::rated_interesting,
        EventKind::rated_not_interesting, EventKind::jump, EventKind::correction, EventKind::recommended_seen};
    std::vector<TopicId> topics;
    for (const auto& n : taxonomy.nodes()) {
        if (n.id != taxonomy.root()) {
            topics.push_back(n.id);
        }
    }
    std::vector<FeedbackEvent> log;
    for (int i = 0; i < events; ++i) {
        FeedbackEvent e;
        e.at = Timestamp::at_midnight(end + static_cast<int>(-rng.between(0, span_days))) +
            static_cast<std::int64_t>(rng.below(86400));
        e.user = user;
        e.kind = kinds[rng.below(6)];
        e.topic = topics[rng.below(topics.size())];
        e.paper = "p" + std::to_string(rng.below(1000));
        e.group = group;
        log.push_back(std::move(e));
    }
    std::stable_sort(log.begin(), log.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
    return log;
}

}  // namespace quickstep::testing
