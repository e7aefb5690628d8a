#include <algorithm>
#include <cstdio>
#include <fstream>

#include "quickstep/evalkit.hpp"
#include "quickstep/service.hpp"
#include "quickstep/store.hpp"

namespace quickstep {

namespace {

std::string two_digits(std::size_t n)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "%02zu", n);
    return buf;
}

std::string three_digits(std::size_t n)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "%03zu", n);
    return buf;
}

struct Paper {
    std::string url;
    TopicId topic;
    std::string text;
};

// Topic-conditioned vocabularies over a two-level taxonomy below the root.
class CorpusGenerator {
public:
    CorpusGenerator(const SimulationConfig& c, const Taxonomy& t) : config_(c), taxonomy_(t)
    {
        std::size_t index = 0;
        for (const auto& n : t.nodes()) {
            if (n.id == t.root()) {
                continue;
            }
            index_[n.id] = index++;
            (t.depth(n.id) == 1 ? categories_ : leaves_).push_back(n.id);
            if (n.parent && *n.parent != t.root()) {
                children_[*n.parent].push_back(n.id);
            }
        }
        if (categories_.empty() || leaves_.empty()) {
            throw InvalidRequest("the simulation taxonomy needs categories and leaf topics");
        }
        for (const auto& leaf : leaves_) {
            if (taxonomy_.depth(leaf) != 2) {
                throw InvalidRequest("the simulation taxonomy must have exactly two levels below the root");
            }
        }
    }

    const std::vector<TopicId>& categories() const { return categories_; }
    const std::vector<TopicId>& children(const TopicId& c) const { return children_.at(c); }

    Paper paper(const std::string& url, const TopicId& topic, Rng& rng) const
    {
        const bool leaf = taxonomy_.depth(topic) == 2;
        std::string text;
        const auto length = rng.between(config_.min_length, config_.max_length);
        for (long long i = 0; i < length; ++i) {
            const double u = rng.uniform();
            if (u < config_.noise_share) {
                text += "n" + three_digits(rng.below(static_cast<std::uint64_t>(config_.noise_words)));
            } else if (u < config_.noise_share + config_.related_share) {
                TopicId related;
                if (leaf) {
                    related = *taxonomy_.node(topic).parent;
                } else {
                    const auto& kids = children_.at(topic);
                    related = kids[rng.below(kids.size())];
                }
                text += core_word(related, rng);
            } else {
                text += core_word(topic, rng);
            }
            text += (i + 1) % 12 == 0 ? ".\n" : " ";
        }
        return {url, topic, text + "\n"};
    }

    TopicId draw_topic(Rng& rng) const
    {
        if (rng.chance(config_.category_paper_share)) {
            return categories_[rng.below(categories_.size())];
        }
        return leaves_[rng.below(leaves_.size())];
    }

private:
    std::string core_word(const TopicId& topic, Rng& rng) const
    {
        return "c" + two_digits(index_.at(topic)) + "w" +
            two_digits(rng.below(static_cast<std::uint64_t>(config_.core_words)));
    }

    const SimulationConfig& config_;
    const Taxonomy& taxonomy_;
    std::map<TopicId, std::size_t> index_;
    std::vector<TopicId> categories_;
    std::vector<TopicId> leaves_;
    std::map<TopicId, std::vector<TopicId>> children_;
};

double affinity_of(const SyntheticUser& u, const TopicId& t)
{
    const auto it = u.affinity.find(t);
    return it == u.affinity.end() ? 0.0 : it->second;
}

// Topic drawn in proportion to affinity.
TopicId weighted_topic(const SyntheticUser& u, Rng& rng)
{
    double total = 0;
    for (const auto& [t, a] : u.affinity) {
        total += a;
    }
    double x = rng.uniform() * total;
    for (const auto& [t, a] : u.affinity) {
        if (x < a) {
            return t;
        }
        x -= a;
    }
    return u.affinity.rbegin()->first;
}

}  // namespace

void SimulationConfig::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw InvalidRequest(std::string("simulation config: ") + what);
        }
    };
    auto probability = [&](double p, const char* what) { require(p >= 0 && p <= 1, what); };
    require(!root.empty(), "root is required");
    require(users >= 2 && users % 2 == 0, "users must be a positive even number");
    require(users <= 198, "users must be at most 198");
    require(papers >= 1, "papers must be positive");
    require(days >= 1, "days must be positive");
    require(core_words >= 1 && core_words <= 100, "core_words must be in [1, 100]");
    require(noise_words >= 1 && noise_words <= 1000, "noise_words must be in [1, 1000]");
    require(min_length >= 1 && min_length <= max_length, "document lengths must satisfy 1 <= min <= max");
    require(noise_share + related_share <= 1 && noise_share >= 0 && related_share >= 0,
        "noise_share + related_share must be in [0, 1]");
    probability(category_paper_share, "category_paper_share must be in [0, 1]");
    require(bootstrap_per_topic >= 1, "bootstrap_per_topic must be positive");
    require(min_interests >= 1 && min_interests <= max_interests, "interests must satisfy 1 <= min <= max");
    probability(home_category_affinity, "home_category_affinity must be in [0, 1]");
    for (const double p : {serve_probability, rating_flip, rate_good, rate_bad, jump_scale, correct_probability,
             random_browse}) {
        probability(p, "behaviour probabilities must be in [0, 1]");
    }
    require(min_browse >= 0 && min_browse <= max_browse, "browse counts must satisfy 0 <= min <= max");
}

SimulationResult simulate(const SimulationConfig& config)
{
    config.validate();
    if (std::filesystem::exists(config.root / "events.log")) {
        throw InvalidRequest(config.root.string() + " already holds a DataRoot");
    }
    const auto ontology = load_taxonomy(config.taxonomy_path, TaxonomyMode::hierarchical);
    const CorpusGenerator corpus(config, ontology);
    Service::initialize(config.root, flatten(ontology), ontology);

    // Corpus and bootstrap papers.
    std::vector<Paper> papers;
    std::map<TopicId, std::vector<std::size_t>> papers_by_topic;
    auto fetcher = std::make_unique<MapFetcher>();
    for (int i = 0; i < config.papers; ++i) {
        Rng rng(mix_seed(config.seed, 0x100000 + static_cast<std::uint64_t>(i)));
        const auto topic = corpus.draw_topic(rng);
        papers.push_back(
            corpus.paper("http://sim.example/papers/p" + three_digits(static_cast<std::size_t>(i)) + ".pdf", topic, rng));
        papers_by_topic[topic].push_back(papers.size() - 1);
        fetcher->add(papers.back().url, papers.back().text);
    }
    std::vector<Paper> bootstrap;
    for (const auto& n : ontology.nodes()) {
        if (n.id == ontology.root()) {
            continue;
        }
        for (int j = 0; j < config.bootstrap_per_topic; ++j) {
            Rng rng(mix_seed(config.seed, 0x200000 + fnv1a(n.id) + static_cast<std::uint64_t>(j)));
            bootstrap.push_back(corpus.paper(
                "http://sim.example/bootstrap/" + n.id + "-" + std::to_string(j) + ".pdf", n.id, rng));
        }
    }
    std::map<std::string, TopicId> true_topic;
    std::string truth_file;
    for (const auto& p : papers) {
        true_topic[p.url] = p.topic;
        truth_file += doc_id_for_url(p.url) + '\t' + p.url + '\t' + p.topic + '\n';
    }
    write_file_atomic(config.root / "truth.tsv", truth_file, WriteOptions{config.service.fsync, std::nullopt});

    Timestamp now = Timestamp::at_midnight(config.start);
    Config service_config = config.service;
    Service service(config.root, service_config, std::move(fetcher), [&now] { return now; });
    MetricAccumulator online;
    service.on_event([&online](const FeedbackEvent& e) { online.add(e); });

    for (const auto g : kAllGroups) {
        for (const auto& p : bootstrap) {
            service.add_training_example(g, p.url, p.text, p.topic);
        }
    }

    // Personas: a home category at fixed affinity plus a few of its leaves.
    SimulationResult result;
    const int personas = config.users / 2;
    std::vector<SyntheticUser> persona_users;
    for (int p = 0; p < personas; ++p) {
        SyntheticUser u;
        u.seed = mix_seed(config.seed, 0x300000 + static_cast<std::uint64_t>(p));
        Rng rng(u.seed);
        const auto& home = corpus.categories()[static_cast<std::size_t>(p) % corpus.categories().size()];
        auto leaves = corpus.children(home);
        rng.shuffle(leaves);
        const auto count = std::min<std::size_t>(leaves.size(),
            static_cast<std::size_t>(rng.between(config.min_interests, config.max_interests)));
        for (std::size_t i = 0; i < count; ++i) {
            u.affinity[leaves[i]] = 0.6 + 0.4 * rng.uniform();
        }
        if (config.home_category_affinity > 0) {
            u.affinity[home] = config.home_category_affinity;
        }
        persona_users.push_back(std::move(u));
    }
    for (const auto g : kAllGroups) {
        for (int p = 0; p < personas; ++p) {
            auto u = persona_users[static_cast<std::size_t>(p)];
            u.user = std::string(g == Group::flat ? "f" : "o") + two_digits(static_cast<std::size_t>(p + 1));
            u.group = g;
            u.seed = mix_seed(u.seed, static_cast<std::uint64_t>(g) + 1);
            service.create_user(u.user, g);
            result.users.push_back(std::move(u));
        }
    }
    std::sort(result.users.begin(), result.users.end(),
        [](const SyntheticUser& a, const SyntheticUser& b) { return a.user < b.user; });

    for (int d = 0; d < config.days; ++d) {
        const Date day = config.start + d;
        now = Timestamp::at_midnight(day) + 30 * 60;
        service.run_cycle(Phase::nightly, day);
        service.run_cycle(Phase::daily, day);

        std::vector<BrowseLogEntry> browses;
        for (std::size_t ui = 0; ui < result.users.size(); ++ui) {
            const auto& u = result.users[ui];
            Rng rng(mix_seed(u.seed, static_cast<std::uint64_t>(d)));
            const auto session = Timestamp::at_midnight(day) + 9 * 3600 + static_cast<std::int64_t>(ui) * 120;
            std::int64_t step = 0;
            auto tick = [&] { now = session + step++; };

            if (rng.chance(config.serve_probability)) {
                tick();
                const auto served = service.serve_recommendations(u.user);
                std::set<TopicId> rated;
                for (const auto& item : served.set.items) {
                    if (!rated.insert(item.topic).second) {
                        continue;
                    }
                    bool good = affinity_of(u, item.topic) > 0;
                    if (rng.chance(config.rating_flip)) {
                        good = !good;
                    }
                    const double p = rng.uniform();
                    if (good && p < config.rate_good) {
                        tick();
                        service.submit_feedback(u.user, item.doc_id, FeedbackKind::interesting);
                    } else if (!good && p < config.rate_bad) {
                        tick();
                        service.submit_feedback(u.user, item.doc_id, FeedbackKind::not_interesting);
                    }
                }
                for (const auto& item : served.set.items) {
                    const auto& truth = true_topic.at(*service.document_url(item.doc_id));
                    const double jump = rng.uniform();
                    const double correct = rng.uniform();
                    if (jump < config.jump_scale * affinity_of(u, truth)) {
                        tick();
                        service.submit_feedback(u.user, item.doc_id, FeedbackKind::jump);
                    }
                    if (truth != item.topic && correct < config.correct_probability) {
                        tick();
                        service.submit_feedback(u.user, item.doc_id, FeedbackKind::correction, truth);
                    }
                }
            }

            const auto n = rng.between(config.min_browse, config.max_browse);
            for (long long b = 0; b < n; ++b) {
                std::size_t pick;
                const auto topic = weighted_topic(u, rng);
                const auto it = papers_by_topic.find(topic);
                if (rng.chance(config.random_browse) || it == papers_by_topic.end()) {
                    pick = rng.below(papers.size());
                } else {
                    pick = it->second[rng.below(it->second.size())];
                }
                browses.push_back({u.user, papers[pick].url, session + 3600 + b, std::nullopt});
            }
        }
        now = Timestamp::at_midnight(day) + 12 * 3600;
        const auto report = service.ingest_browse_log(browses);
        if (!report.errors.empty()) {
            throw Error("simulated browse rejected: " + report.errors.front().message);
        }
    }

    result.last_day = config.start + (config.days - 1);
    result.series = online.all(result.last_day);
    result.report = format_report(result.series);
    write_file_atomic(config.root / "report.tsv", result.report, WriteOptions{config.service.fsync, std::nullopt});
    return result;
}

}  // namespace quickstep
