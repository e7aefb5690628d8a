#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "quickstep/porter.hpp"
#include "quickstep/text.hpp"

using namespace quickstep;

namespace {

using Tokens = std::vector<std::string>;

StopList smart_stoplist()
{
    return StopList::load(std::filesystem::path(QUICKSTEP_DATA_DIR) / "stoplist.smart.txt");
}

}  // namespace

TEST(Tokenize, Examples)
{
    EXPECT_EQ(tokenize(""), Tokens{});
    EXPECT_EQ(tokenize("Agents learn."), (Tokens{"agents", "learn"}));
    EXPECT_EQ(tokenize("TF-IDF weighting"), (Tokens{"tf", "idf", "weighting"}));
}

TEST(Tokenize, DigitsAndNonAscii)
{
    EXPECT_EQ(tokenize("IEEE 802.11b, 2003"), (Tokens{"ieee", "802", "11b", "2003"}));
    // Latin-1 capitals fold, em-dash and curly quotes separate.
    EXPECT_EQ(tokenize("\xC3\x89tude\xE2\x80\x94na\xC3\xAFve \xE2\x80\x9Cq\xE2\x80\x9D"),
        (Tokens{"\xC3\xA9tude", "na\xC3\xAFve", "q"}));
    // A stray continuation byte is a separator, never part of a token.
    EXPECT_EQ(tokenize("ab\x80" "cd"), (Tokens{"ab", "cd"}));
}

TEST(Tokenize, IdempotentOnJoinedOutput)
{
    Rng rng(7);
    const std::string alphabet = "aZ9 -._\t\n\xC3\x89";
    for (int round = 0; round < 200; ++round) {
        std::string text;
        const auto len = rng.below(60);
        for (std::uint64_t i = 0; i < len; ++i) {
            text.push_back(alphabet[rng.below(alphabet.size())]);
        }
        const auto once = tokenize(text);
        std::string joined;
        for (const auto& t : once) {
            joined += (joined.empty() ? "" : " ") + t;
        }
        EXPECT_EQ(tokenize(joined), once) << text;
        for (const auto& t : once) {
            EXPECT_FALSE(t.empty());
        }
    }
}

TEST(StopWords, Examples)
{
    const StopList sl = smart_stoplist();
    EXPECT_GT(sl.size(), 500u);
    EXPECT_EQ(remove_stopwords({"the", "agent"}, sl), Tokens{"agent"});
    EXPECT_EQ(remove_stopwords({}, sl), Tokens{});
    EXPECT_EQ(remove_stopwords({"agent", "agent"}, sl), (Tokens{"agent", "agent"}));
}

TEST(StopWords, ParsesCommentsAndBlankLines)
{
    const StopList sl = StopList::parse("# header\nthe\n\n  of  # trailing\n");
    EXPECT_EQ(sl.size(), 2u);
    EXPECT_TRUE(sl.contains("the"));
    EXPECT_TRUE(sl.contains("of"));
    EXPECT_FALSE(sl.contains("#"));
}

TEST(Stem, Examples)
{
    EXPECT_EQ(stem("sky"), "sky");
    EXPECT_EQ(stem("caresses"), "caress");
    EXPECT_EQ(stem("ponies"), "poni");
}

TEST(Stem, ClassicRuleExamples)
{
    const std::map<std::string, std::string> cases{
        {"agreed", "agre"},
        {"feed", "feed"},
        {"hopping", "hop"},
        {"filing", "file"},
        {"falling", "fall"},
        {"relational", "relat"},
        {"generalization", "gener"},
        {"controll", "control"},
        {"happy", "happi"},
        {"adjustment", "adjust"},
    };
    for (const auto& [word, expected] : cases) {
        EXPECT_EQ(porter_stem(word), expected) << word;
    }
}

TEST(Stem, LeavesNonAsciiTokensAlone)
{
    EXPECT_EQ(stem("\xC3\xA9tudes"), "\xC3\xA9tudes");
    EXPECT_EQ(stem(""), "");
}

TEST(Stem, AgreesWithReferenceVocabulary)
{
    std::ifstream in(std::filesystem::path(QUICKSTEP_TEST_DATA) / "porter_reference.tsv");
    ASSERT_TRUE(in);
    std::string line;
    std::size_t total = 0;
    std::size_t mismatches = 0;
    while (std::getline(in, line)) {
        const auto tab = line.find('\t');
        ASSERT_NE(tab, std::string::npos);
        const std::string word = line.substr(0, tab);
        const std::string expected = line.substr(tab + 1);
        ++total;
        if (porter_stem(word) != expected) {
            if (++mismatches <= 20) {
                ADD_FAILURE() << word << ": got " << porter_stem(word) << ", reference " << expected;
            }
        }
    }
    EXPECT_GE(total, 10000u);
    EXPECT_EQ(mismatches, 0u);
}

TEST(BuildVector, Examples)
{
    const StopList none;
    const auto v = build_vector("d1", "agents agent learning", none);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_DOUBLE_EQ(v.weight("agent"), 2.0 / 3.0);
    EXPECT_EQ(v.weight("learn"), 0.0);

    EXPECT_TRUE(build_vector("d2", "one two three", none).empty());
    EXPECT_TRUE(build_vector("d3", "", none).empty());

    const auto w = build_vector("d4", "filters filter filtering agent agents", none);
    ASSERT_EQ(w.size(), 2u);
    EXPECT_EQ(w.weight("filter"), 3.0 / 5.0);
    EXPECT_EQ(w.weight("agent"), 2.0 / 5.0);
}

TEST(BuildVector, StopWordsLeaveTheDenominator)
{
    // "the" x3 is stop-listed before counting: N = 4, not 7.
    const auto v = build_vector("d", "the agent the agent the learner learners", smart_stoplist());
    EXPECT_EQ(v.weight("agent"), 0.5);
    EXPECT_EQ(v.weight("learner"), 0.5);
}

TEST(BuildVector, IsPureFunctionOfInputs)
{
    const StopList sl = smart_stoplist();
    const std::string text = "Boosting boosts weak learners; learners boost. Boosting!";
    EXPECT_EQ(build_vector("x", text, sl), build_vector("x", text, sl));
}

TEST(Cosine, Examples)
{
    const TermVector v("v", std::map<std::string, double>{{"a", 0.25}, {"b", 0.5}, {"c", 0.125}});
    EXPECT_EQ(cosine(v, v), 1.0);

    const TermVector p("p", std::map<std::string, double>{{"x", 0.5}});
    const TermVector q("q", std::map<std::string, double>{{"y", 0.5}});
    EXPECT_EQ(cosine(p, q), 0.0);

    const TermVector a("a", std::map<std::string, double>{{"x", 1.0}});
    const TermVector b("b", std::map<std::string, double>{{"x", 1.0}, {"y", 1.0}});
    EXPECT_NEAR(cosine(a, b), 1.0 / std::sqrt(2.0), 1e-15);

    EXPECT_EQ(cosine(TermVector{}, a), 0.0);
}

TEST(Cosine, SymmetricBoundedSelfSimilar)
{
    Rng rng(11);
    auto random_vector = [&](const char* id) {
        std::map<std::string, double> m;
        const auto n = 1 + rng.below(12);
        for (std::uint64_t i = 0; i < n; ++i) {
            m["s" + std::to_string(rng.below(20))] = 0.001 + rng.uniform();
        }
        return TermVector(id, m);
    };
    for (int i = 0; i < 500; ++i) {
        const auto a = random_vector("a");
        const auto b = random_vector("b");
        const double ab = cosine(a, b);
        EXPECT_EQ(ab, cosine(b, a));
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
        EXPECT_EQ(cosine(a, a), 1.0);
    }
}

TEST(TermVectorType, RejectsInvalidWeights)
{
    EXPECT_THROW(TermVector("x", std::map<std::string, double>{{"a", 0.0}}), InvalidRequest);
    EXPECT_THROW(TermVector("x", std::vector<TermVector::Entry>{{"a", 0.5}, {"a", 0.5}}), InvalidRequest);
}

TEST(SuffixFilter, DefaultsMirrorPaperFormats)
{
    const SuffixFilter f;
    EXPECT_TRUE(f.accepts("http://host/papers/x.pdf"));
    EXPECT_TRUE(f.accepts("http://host/x.ps.Z"));
    EXPECT_TRUE(f.accepts("http://host/x.PS.GZ?download=1"));
    EXPECT_FALSE(f.accepts("http://host/index.html"));
    EXPECT_FALSE(f.accepts("http://host/pdf"));
    EXPECT_FALSE(f.accepts(".pdf"));
}
