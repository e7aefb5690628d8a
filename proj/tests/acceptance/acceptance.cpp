// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only N]... [--allow-fail N]... [--data DIR]
//
// Exit status is 0 only when every selected criterion passes, not counting
// criteria named by --allow-fail (their verdict is still printed).

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>

#include "../service_support.hpp"
#include "../support.hpp"
#include "quickstep/evalkit.hpp"
#include "quickstep/records.hpp"
#include "quickstep/store.hpp"

namespace fs = std::filesystem;
using namespace quickstep;
using namespace quickstep::testing;

namespace {

fs::path g_data = QUICKSTEP_TEST_DATA;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> notes;  // printed as INFO lines under the verdict

    void require(bool ok, const std::string& what)
    {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double v, int decimals = 3)
{
    return format_fixed(v, decimals);
}

bool same_bits(double a, double b)
{
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// 1 -------------------------------------------------------------------------

Outcome vector_pipeline()
{
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto stoplist = StopList::load(fs::path(QUICKSTEP_DATA_DIR) / "stoplist.smart.txt");
    std::size_t docs = 0;
    double max_sum = 0;
    for (const auto& entry : fs::directory_iterator(g_data / "corpus")) {
        if (entry.path().extension() != ".txt") {
            continue;
        }
        ++docs;
        const auto text = read_file(entry.path());
        const auto v = build_vector(entry.path().stem().string(), text, stoplist);

        // Recount by hand: kept stems are exactly those seen twice or more.
        std::map<std::string, std::size_t> counts;
        std::size_t total = 0;
        for (const auto& token : tokenize(text)) {
            if (!stoplist.contains(token)) {
                ++counts[stem(token)];
                ++total;
            }
        }
        std::map<std::string, double> expected;
        for (const auto& [s, c] : counts) {
            if (c >= 2) {
                expected[s] = static_cast<double>(c) / static_cast<double>(total);
            }
        }
        std::map<std::string, double> got(v.entries().begin(), v.entries().end());
        out.require(got == expected, entry.path().filename().string() + ": kept stems or weights differ from count/N");
        const double sum = std::accumulate(v.entries().begin(), v.entries().end(), 0.0,
            [](double s, const auto& e) { return s + e.second; });
        max_sum = std::max(max_sum, sum);
        out.require(sum <= 1.0, entry.path().filename().string() + ": weights sum to " + format_double(sum));
    }
    out.require(docs == 50, "expected 50 corpus documents, found " + std::to_string(docs));

    std::ifstream ref(g_data / "porter_reference.tsv");
    std::string line;
    std::size_t words = 0, agree = 0;
    std::string first_miss;
    while (std::getline(ref, line)) {
        const auto tab = line.find('\t');
        const auto word = line.substr(0, tab);
        const auto expected = line.substr(tab + 1);
        ++words;
        if (stem(word) == expected) {
            ++agree;
        } else if (first_miss.empty()) {
            first_miss = word + " -> " + stem(word) + " (reference " + expected + ")";
        }
    }
    out.require(words >= 10000, "reference list has only " + std::to_string(words) + " words");
    out.require(agree == words, "stemmer disagrees on " + std::to_string(words - agree) + " words, e.g. " + first_miss);
    const double elapsed = seconds_since(t0);
    out.require(elapsed < 5.0, "took " + fixed(elapsed) + " s");
    if (out.pass) {
        out.detail = std::to_string(docs) + " docs, max weight sum " + fixed(max_sum, 4) + ", Porter " +
            std::to_string(agree) + "/" + std::to_string(words) + ", " + fixed(elapsed) + " s";
    }
    return out;
}

// 2 -------------------------------------------------------------------------

Outcome knn_oracle()
{
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(20240601);
    std::size_t queries = 0, unclassifiable = 0;
    for (const int k : {1, 3, 5}) {
        TrainingSet set{Group::flat, {}};
        std::vector<oracle::LabelledMap> plain;
        for (int i = 0; i < 60; ++i) {
            const auto m = random_weights(rng, 30, 7);
            const std::string topic = "t" + std::to_string(rng.below(5));
            set.examples.push_back({vec("e" + std::to_string(i), m), topic, ExampleSource::bootstrap, Date{}});
            plain.push_back({m, topic});
        }
        std::vector<double> weights(set.size());
        for (auto& w : weights) {
            w = 0.01 + rng.uniform();
        }
        const KnnModel model(std::make_shared<const ExampleIndex>(set), k, weights);
        for (int q = 0; q < 100; ++q) {
            ++queries;
            const auto qm = random_weights(rng, 34, 7);
            const auto expected = oracle::brute_force_knn(plain, weights, k, qm);
            Ranking got;
            try {
                got = knn_classify(model, vec("q", qm));
            } catch (const Unclassifiable&) {
                ++unclassifiable;
            }
            bool equal = got.size() == expected.size();
            for (std::size_t i = 0; equal && i < got.size(); ++i) {
                equal = got[i].topic == expected[i].first && same_bits(got[i].confidence, expected[i].second);
            }
            out.require(equal, "k=" + std::to_string(k) + " query " + std::to_string(q) + " ranking differs");
        }
    }
    const double elapsed = seconds_since(t0);
    out.require(elapsed < 10.0, "took " + fixed(elapsed) + " s");
    if (out.pass) {
        out.detail = std::to_string(queries) + " queries over k=1,3,5 identical (" + std::to_string(unclassifiable) +
            " unclassifiable on both sides), " + fixed(elapsed) + " s";
    }
    return out;
}

// 3 -------------------------------------------------------------------------

Outcome boosting_invariants()
{
    Outcome out;
    std::size_t runs = 0, rounds = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto corpus = noisy_two_topic_corpus(seed, 80, 10, 0.2, 0.08);
        for (const int k : {1, 3, 5}) {
            const auto committee = train_boost(corpus.train, 10, seed, k);
            ++runs;
            const auto where = "seed " + std::to_string(seed) + " k=" + std::to_string(k);
            for (std::size_t i = 0; i < committee.trace.size(); ++i) {
                const auto& r = committee.trace[i];
                ++rounds;
                out.require(std::abs(r.distribution_sum - 1.0) <= 1e-9,
                    where + " round " + std::to_string(r.round) + ": distribution sums to " +
                        format_double(r.distribution_sum));
                const bool halts = i + 1 == committee.trace.size();
                out.require((r.accepted && r.error < 0.5) || (!r.accepted && halts),
                    where + " round " + std::to_string(r.round) + ": error " + format_double(r.error) +
                        " without halting");
            }
            for (const auto& m : committee.members) {
                const auto& w = m.model.instance_weights();
                out.require(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= 1e-9,
                    where + ": member weights do not sum to 1");
            }
        }
    }

    // T=1 against the bare learner on the fixture queries.
    std::size_t queries = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto corpus = noisy_two_topic_corpus(100 + seed);
        for (const int k : {1, 3, 5}) {
            const auto committee = train_boost(corpus.train, 1, seed, k);
            const auto base = KnnModel::uniform(std::make_shared<const ExampleIndex>(corpus.train), k);
            for (const auto& [v, truth] : corpus.test) {
                ++queries;
                std::string boosted, plain;
                try {
                    boosted = classify(committee, v).front().topic;
                } catch (const Unclassifiable&) {
                }
                try {
                    plain = knn_classify(base, v).front().topic;
                } catch (const Unclassifiable&) {
                }
                out.require(boosted == plain, "T=1 committee disagrees with the base learner on " + v.doc_id());
            }
        }
    }
    if (out.pass) {
        out.detail = std::to_string(runs) + " runs, " + std::to_string(rounds) +
            " rounds within 1e-9 and below 0.5 error; T=1 identical on " + std::to_string(queries) + " queries";
    }
    return out;
}

// 4 -------------------------------------------------------------------------

Outcome boosting_benefit()
{
    Outcome out;
    std::string values;
    std::string members;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto corpus = noisy_two_topic_corpus(seed, 120, 200, 0.10);
        const double single = accuracy(train_boost(corpus.train, 1, seed), corpus.test);
        const auto committee = train_boost(corpus.train, 10, seed);
        const double boosted = accuracy(committee, corpus.test);
        members += (members.empty() ? "" : ", ") + std::to_string(committee.members.size());
        out.require(boosted >= single, "seed " + std::to_string(seed) + ": T=10 " + fixed(boosted) + " < T=1 " +
                fixed(single));
        values += (values.empty() ? "" : ", ") + fixed(single) + "->" + fixed(boosted);
        const double single5 = accuracy(train_boost(corpus.train, 1, seed, 5), corpus.test);
        const auto committee5 = train_boost(corpus.train, 10, seed, 5);
        const double boosted5 = accuracy(committee5, corpus.test);
        out.notes.push_back("seed " + std::to_string(seed) + " k=5: T=1 " + fixed(single5) + ", T=10 " +
            fixed(boosted5) + " with " + std::to_string(committee5.members.size()) + " members");
    }
    out.notes.push_back("k=1 committee sizes at T=10: " + members);
    if (out.pass) {
        out.detail = "k=1 holdout accuracy T=1->T=10 over 5 seeds: " + values;
    }
    return out;
}

// 5 -------------------------------------------------------------------------

Outcome cross_validation()
{
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto separable = cross_validate(separable_set(20), 10, 10, 7);
    out.require(separable.precision == 1.0 && separable.recall == 1.0,
        "separable set: precision " + format_double(separable.precision) + ", recall " +
            format_double(separable.recall));

    TrainingSet conflicting{Group::flat, {}};
    for (int i = 0; i < 10; ++i) {
        const WeightMap m{{"w" + std::to_string(i), 0.5}, {"shared", 0.25}};
        conflicting.examples.push_back({vec("a" + std::to_string(i), m), "A", ExampleSource::bootstrap, Date{}});
        conflicting.examples.push_back({vec("b" + std::to_string(i), m), "B", ExampleSource::bootstrap, Date{}});
    }
    const auto conflict = cross_validate(conflicting, 10, 10, 3);
    out.require(conflict.precision < 1.0, "conflicting set: precision " + format_double(conflict.precision));
    const double elapsed = seconds_since(t0);
    out.require(elapsed < 30.0, "took " + fixed(elapsed) + " s");
    if (out.pass) {
        out.detail = "separable P=R=1 over " + std::to_string(separable.held_out) + " held out; conflicting P=" +
            fixed(conflict.precision) + "; " + fixed(elapsed) + " s";
    }
    return out;
}

// 6 -------------------------------------------------------------------------

double interest_of(const std::map<TopicId, double>& m, const TopicId& t)
{
    const auto it = m.find(t);
    return it == m.end() ? 0.0 : it->second;
}

Outcome profiler_arithmetic()
{
    Outcome out;
    const auto flat = parse_taxonomy("top\ttop\t-\nT\tT\ttop\n", TaxonomyMode::flat);
    const auto tree = parse_taxonomy("top\ttop\t-\nM\tM\ttop\nT\tT\tM\n", TaxonomyMode::hierarchical);
    const Date today = Date::parse("2024-03-10");
    auto rating = [&](Date d, Group g) {
        return FeedbackEvent{Timestamp::at_midnight(d) + 3600, "u", EventKind::rated_interesting, "T", std::nullopt, g};
    };
    auto close = [](const std::map<TopicId, double>& got, const std::map<TopicId, double>& want) {
        if (got.size() != want.size()) {
            return false;
        }
        for (const auto& [t, v] : want) {
            if (!got.count(t) || std::abs(got.at(t) - v) > 1e-12) {
                return false;
            }
        }
        return true;
    };
    out.require(compute_profile({}, flat, "u", today).interest.empty(), "empty log does not give {}");
    const std::vector<FeedbackEvent> a{rating(today, Group::flat)};
    out.require(close(compute_profile(a, flat, "u", today).interest, {{"T", 10.0}}), "flat rating today != {T:10}");
    const std::vector<FeedbackEvent> b{rating(today, Group::ontology)};
    out.require(close(compute_profile(b, tree, "u", today).interest, {{"T", 10.0}, {"M", 5.0}, {"top", 2.5}}),
        "ontology rating today != {T:10, M:5, root:2.5}");
    const std::vector<FeedbackEvent> c{rating(today + -9, Group::flat)};
    out.require(close(compute_profile(c, flat, "u", today).interest, {{"T", 1.0}}), "9-day-old rating != {T:1}");
    if (!out.pass) {
        return out;
    }

    // |interest(t)| must not grow as `now` advances, for every topic of every log.
    const auto cs = load_taxonomy(fs::path(QUICKSTEP_DATA_DIR) / "taxonomy.cs.tsv", TaxonomyMode::hierarchical);
    std::size_t violating_logs = 0, split_violations = 0, single_sign_logs = 0, single_sign_violations = 0;
    std::string example;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        Rng rng(mix_seed(6, seed));
        const int n = static_cast<int>(rng.between(1, 40));
        const auto log = random_event_log(rng, cs, "u", Group::ontology, n, today, 30);
        std::vector<FeedbackEvent> positive, negative;
        for (const auto& e : log) {
            const double w = ProfileConfig{}.weights.of(e.kind);
            (w < 0 ? negative : positive).push_back(e);
        }
        if (negative.empty() || positive.empty()) {
            ++single_sign_logs;
        }
        auto prev = compute_profile(log, cs, "u", today).interest;
        auto prev_pos = compute_profile(positive, cs, "u", today).interest;
        auto prev_neg = compute_profile(negative, cs, "u", today).interest;
        bool violated = false;
        for (int step = 1; step <= 60; ++step) {
            const auto now = today + step;
            const auto cur = compute_profile(log, cs, "u", now).interest;
            const auto cur_pos = compute_profile(positive, cs, "u", now).interest;
            const auto cur_neg = compute_profile(negative, cs, "u", now).interest;
            for (const auto& node : cs.nodes()) {
                const auto& t = node.id;
                if (!violated && std::abs(interest_of(cur, t)) > std::abs(interest_of(prev, t))) {
                    violated = true;
                    if (example.empty()) {
                        example = "seed " + std::to_string(seed) + " topic " + t + ": |" +
                            format_double(interest_of(prev, t)) + "| on " + (now + -1).str() + " -> |" +
                            format_double(interest_of(cur, t)) + "| on " + now.str();
                    }
                }
                if (std::abs(interest_of(cur_pos, t)) > std::abs(interest_of(prev_pos, t)) ||
                    std::abs(interest_of(cur_neg, t)) > std::abs(interest_of(prev_neg, t))) {
                    ++split_violations;
                }
            }
            prev = cur;
            prev_pos = cur_pos;
            prev_neg = cur_neg;
        }
        violating_logs += violated ? 1 : 0;
        if (violated && (negative.empty() || positive.empty())) {
            ++single_sign_violations;
        }
    }
    out.notes.push_back("positive and negative contributions each decay monotonically in all 1000 logs: " +
        std::string(split_violations == 0 ? "yes" : "no (" + std::to_string(split_violations) + " violations)"));
    out.notes.push_back(std::to_string(single_sign_logs) + " of 1000 logs have events of one sign only; " +
        std::to_string(single_sign_violations) + " of those violate the property");
    out.require(violating_logs == 0, "|interest| grew over time in " + std::to_string(violating_logs) +
            " of 1000 logs, e.g. " + example);
    if (out.pass) {
        out.detail = "four examples within 1e-12; |interest| non-increasing over 60 days for 1000 logs";
    }
    return out;
}

// 7 -------------------------------------------------------------------------

Outcome flat_ontology_equivalence()
{
    Outcome out;
    const auto cs = load_taxonomy(fs::path(QUICKSTEP_DATA_DIR) / "taxonomy.cs.tsv", TaxonomyMode::hierarchical);
    const auto flat = flatten(cs);
    const auto depth1 = Taxonomy::from_nodes(TaxonomyMode::hierarchical, flat.nodes());
    const Date today = Date::parse("2024-05-20");
    std::vector<TopicId> topics;
    for (const auto& n : flat.nodes()) {
        if (n.id != flat.root()) {
            topics.push_back(n.id);
        }
    }
    std::size_t items = 0;
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        Rng rng(mix_seed(7, seed));
        const auto log_f = random_event_log(rng, flat, "u", Group::flat, static_cast<int>(rng.between(1, 50)), today, 20);
        auto log_o = log_f;
        for (auto& e : log_o) {
            e.group = Group::ontology;
        }
        const auto pf = compute_profile(log_f, flat, "u", today);
        const auto po = compute_profile(log_o, depth1, "u", today);
        const auto a = pf.without_root();
        const auto b = po.without_root();
        bool equal = a.size() == b.size();
        for (auto i = a.begin(), j = b.begin(); equal && i != a.end(); ++i, ++j) {
            equal = i->first == j->first && same_bits(i->second, j->second);
        }
        out.require(equal, "seed " + std::to_string(seed) + ": profiles differ");

        ClassifiedStore store;
        std::set<std::string> seen;
        for (int p = 0; p < 120; ++p) {
            const auto doc = "d" + std::to_string(1000 + p);
            const auto topic = topics[rng.below(topics.size())];
            const double conf = 0.05 + 0.95 * rng.uniform();
            for (const auto g : kAllGroups) {
                store.upsert({doc, g, topic, conf, today});
            }
            if (rng.chance(0.2)) {
                seen.insert(doc);
            }
        }
        const auto rf = daily_recommend(pf, Group::flat, store, seen);
        const auto ro = daily_recommend(po, Group::ontology, store, seen);
        bool same = rf.items.size() == ro.items.size();
        for (std::size_t i = 0; same && i < rf.items.size(); ++i) {
            const auto& x = rf.items[i];
            const auto& y = ro.items[i];
            same = x.doc_id == y.doc_id && x.topic == y.topic && x.rank == y.rank &&
                same_bits(x.confidence, y.confidence) && same_bits(x.score, y.score);
        }
        items += rf.items.size();
        out.require(same, "seed " + std::to_string(seed) + ": recommendations differ");
    }
    if (out.pass) {
        out.detail = "300 logs over a 30-topic depth-1 taxonomy: profiles (root entry aside) and " +
            std::to_string(items) + " recommendations bitwise identical";
    }
    return out;
}

// 8, 9 ----------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& root)
{
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) {
            files[fs::relative(entry.path(), root).string()] = read_file(entry.path());
        }
    }
    return files;
}

struct Benchmark {
    std::unique_ptr<TempDir> dir;
    SimulationResult result;
    double seconds = 0;
};

Benchmark run_benchmark()
{
    Benchmark b;
    b.dir = std::make_unique<TempDir>("accept");
    SimulationConfig config;
    config.root = b.dir->path() / "root";
    const auto t0 = std::chrono::steady_clock::now();
    b.result = simulate(config);
    b.seconds = seconds_since(t0);
    return b;
}

std::optional<Benchmark> g_benchmark;

const Benchmark& benchmark()
{
    if (!g_benchmark) {
        g_benchmark = run_benchmark();
    }
    return *g_benchmark;
}

Outcome simulation()
{
    Outcome out;
    const auto& first = benchmark();
    const auto& series = first.result.series;
    const double flat_good = final_value(find_series(series, Group::flat, Metric::good_topic));
    const double onto_good = final_value(find_series(series, Group::ontology, Metric::good_topic));
    const double flat_jump = final_value(find_series(series, Group::flat, Metric::good_jump));
    const double onto_jump = final_value(find_series(series, Group::ontology, Metric::good_jump));
    out.require(onto_good >= flat_good,
        "ontology good-topic ratio " + fixed(onto_good) + " < flat " + fixed(flat_good));
    out.require(flat_jump > 0 && onto_jump > 0,
        "good-jump ratios flat " + fixed(flat_jump) + ", ontology " + fixed(onto_jump));
    out.require(first.seconds < 60.0, "took " + fixed(first.seconds) + " s");

    const auto second = run_benchmark();
    const auto a = snapshot(first.dir->path() / "root");
    const auto b = snapshot(second.dir->path() / "root");
    out.require(a == b, "rerun with seed 42 produced different files");
    out.require(first.result.report == second.result.report, "rerun produced a different report");
    std::size_t bytes = 0;
    for (const auto& [name, content] : a) {
        bytes += content.size();
    }
    out.notes.push_back("correction ratio flat " +
        fixed(final_value(find_series(series, Group::flat, Metric::correction))) + ", ontology " +
        fixed(final_value(find_series(series, Group::ontology, Metric::correction))));
    if (out.pass) {
        out.detail = "good topic ontology " + fixed(onto_good) + " >= flat " + fixed(flat_good) + "; good jump flat " +
            fixed(flat_jump) + ", ontology " + fixed(onto_jump) + "; " + fixed(first.seconds) + " s; rerun identical (" +
            std::to_string(a.size()) + " files, " + std::to_string(bytes) + " bytes)";
    }
    return out;
}

Outcome replay()
{
    Outcome out;
    const auto& b = benchmark();
    const auto root = b.dir->path() / "root";
    const auto until = b.result.last_day;

    // Derived state: trained committees, the report and everything held in memory.
    const auto saved_report = read_file(root / "report.tsv");
    std::size_t removed = 0;
    for (const auto& name : {"committee.flat.txt", "committee.ontology.txt", "report.tsv"}) {
        removed += fs::remove(root / name) ? 1 : 0;
    }
    out.require(removed == 3, "expected committees and report in the data root");

    const auto from_file = evaluate_data_root(root, until);
    out.require(from_file == b.result.series, "series recomputed from events.log differ from the online series");
    out.require(format_report(from_file) == saved_report, "recomputed report differs from the saved report");

    Service reopened(root, Config{}, std::make_unique<MapFetcher>(), [] { return Timestamp::now(); });
    MetricAccumulator acc;
    const auto events = reopened.events();
    acc.add_all(events);
    out.require(acc.all(until) == b.result.series, "series from the replayed service differ from the online series");

    std::size_t points = 0;
    for (const auto& s : from_file) {
        points += s.points.size();
    }
    if (out.pass) {
        out.detail = std::to_string(from_file.size()) + " series, " + std::to_string(points) + " points from " +
            std::to_string(events.size()) + " replayed events bit-exact";
    }
    return out;
}

// 10 ------------------------------------------------------------------------

FeedbackEvent random_event(Rng& rng, std::int64_t i)
{
    static constexpr EventKind kinds[] = {EventKind::browsed, EventKind::rated_interesting,
        EventKind::rated_not_interesting, EventKind::jump, EventKind::correction, EventKind::recommended_seen};
    return {Timestamp::parse("2024-01-01T00:00:00Z") + i * 37, "u" + std::to_string(rng.below(9)),
        kinds[rng.below(6)], "topic-" + std::to_string(rng.below(30)),
        rng.chance(0.8) ? std::optional<std::string>("d" + std::to_string(rng.below(100000))) : std::nullopt,
        rng.chance(0.5) ? Group::flat : Group::ontology};
}

Outcome crash_safety()
{
    Outcome out;
    TempDir dir("crash");
    std::size_t survivors = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Rng rng(mix_seed(10, seed));
        const auto path = dir.path() / ("events." + std::to_string(seed) + ".log");
        std::vector<FeedbackEvent> acked;
        std::vector<FeedbackEvent> batch;
        std::size_t offset = 0;
        std::int64_t next = 0;
        {
            EventCollection log(path);
            const auto batches = rng.between(1, 6);
            for (long long b = 0; b < batches; ++b) {
                std::vector<FeedbackEvent> records;
                for (auto n = rng.between(1, 8); n > 0; --n) {
                    records.push_back(random_event(rng, next++));
                }
                log.append_all(records);
                acked.insert(acked.end(), records.begin(), records.end());
            }
            for (auto n = rng.between(1, 8); n > 0; --n) {
                batch.push_back(random_event(rng, next++));
            }
            std::size_t bytes = 0;
            for (const auto& e : batch) {
                bytes += format_event(e).size() + 1;
            }
            offset = rng.below(bytes);
            log.log().crash_after(offset);
            bool crashed = false;
            try {
                log.append_all(batch);
            } catch (const SimulatedCrash&) {
                crashed = true;
            }
            out.require(crashed, "seed " + std::to_string(seed) + ": injected crash did not fire");
        }
        std::vector<FeedbackEvent> recovered;
        try {
            recovered = EventCollection(path).records();
        } catch (const Error& e) {
            out.require(false, "seed " + std::to_string(seed) + ": reopening failed: " + e.what());
            continue;
        }
        const bool prefix = recovered.size() >= acked.size() &&
            std::equal(acked.begin(), acked.end(), recovered.begin());
        out.require(prefix, "seed " + std::to_string(seed) + ": acked records lost or changed after a crash at byte " +
                std::to_string(offset));
        for (std::size_t i = acked.size(); prefix && i < recovered.size(); ++i) {
            out.require(i - acked.size() < batch.size() && recovered[i] == batch[i - acked.size()],
                "seed " + std::to_string(seed) + ": recovered a record that was never written");
        }
        survivors += recovered.size() - std::min(recovered.size(), acked.size());

        // A whole-file rewrite interrupted at the same offset leaves the old file.
        const auto whole = dir.path() / ("whole." + std::to_string(seed) + ".txt");
        write_file_atomic(whole, "old\n");
        try {
            write_file_atomic(whole, std::string(offset + 1, 'x') + "\n", WriteOptions{false, offset});
        } catch (const SimulatedCrash&) {
        }
        out.require(read_file(whole) == "old\n", "seed " + std::to_string(seed) + ": interrupted rewrite clobbered file");
    }
    if (out.pass) {
        out.detail = "100 seeded crash points: every acked record intact (" + std::to_string(survivors) +
            " whole records of interrupted batches survived), interrupted rewrites left old files";
    }
    return out;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv)
{
    std::set<int> only;
    std::set<int> allowed;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only.insert(std::stoi(argv[++i]));
        } else if (arg == "--allow-fail" && i + 1 < argc) {
            allowed.insert(std::stoi(argv[++i]));
        } else if (arg == "--data" && i + 1 < argc) {
            g_data = argv[++i];
        } else {
            std::cerr << "usage: acceptance [--only N]... [--allow-fail N]... [--data DIR]\n";
            return 2;
        }
    }
    const std::vector<Criterion> criteria{
        {1, "Vector pipeline", vector_pipeline},
        {2, "kNN oracle equivalence", knn_oracle},
        {3, "AdaBoost.M1 invariants", boosting_invariants},
        {4, "Boosting benefit", boosting_benefit},
        {5, "Cross-validation harness", cross_validation},
        {6, "Profiler arithmetic", profiler_arithmetic},
        {7, "Flat/ontology equivalence", flat_ontology_equivalence},
        {8, "End-to-end simulation", simulation},
        {9, "Replay integrity", replay},
        {10, "Crash safety", crash_safety},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) {
            continue;
        }
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const bool tolerated = !o.pass && allowed.count(c.id);
        failed += o.pass || tolerated ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << std::endl;
        for (const auto& note : o.notes) {
            std::cout << "     INFO " << note << std::endl;
        }
        if (tolerated) {
            std::cout << "     INFO failure tolerated by --allow-fail " << c.id << std::endl;
        }
    }
    return failed == 0 ? 0 : 1;
}
