#include <cmath>

#include <gtest/gtest.h>

#include "advect/counts.hpp"
#include "advect/synth.hpp"

using namespace advect;
using namespace advect::synth;

namespace {

MixtureSpec two_topics(std::vector<std::vector<double>> mixture, std::uint64_t seed = 3) {
    MixtureSpec s;
    s.topics = {{"alpha", make_words("alpha", 20), zipf_weights(20), {}},
                {"beta", make_words("beta", 20), zipf_weights(20), {}}};
    for (std::size_t p = 0; p < mixture.size(); ++p) s.periods.push_back("P" + std::to_string(p));
    s.mixture = std::move(mixture);
    s.docs_per_period = 20;
    s.doc_length_min = 80;
    s.doc_length_max = 120;
    s.block_length = 20;
    s.seed = seed;
    return s;
}

PeriodCorpus word_corpus(const std::string& word, std::size_t per_period, std::size_t periods) {
    auto c = PeriodCorpus::with_periods([&] {
        std::vector<std::string> p;
        for (std::size_t i = 0; i < periods; ++i) p.push_back("P" + std::to_string(i));
        return p;
    }());
    for (std::size_t p = 0; p < periods; ++p) {
        Document d;
        for (std::size_t i = 0; i < per_period; ++i) {
            d.tokens.push_back(c.vocab.intern(word));
            d.tokens.push_back(c.vocab.intern("filler"));
        }
        c.documents[p].push_back(d);
    }
    c.recompute_totals();
    return c;
}

} // namespace

TEST(GenerateMixture, SingleTopicVocabularyOnly) {
    auto g = generate_mixture(two_topics({{1.0, 0.0}}));
    for (const auto& d : g.corpus.documents[0])
        for (auto id : d.tokens) ASSERT_EQ(g.corpus.vocab.word(id).rfind("alpha", 0), 0u);
    for (const auto& d : g.labels[0])
        for (auto l : d) ASSERT_EQ(l, 0);
}

TEST(GenerateMixture, DeterministicPerSeed) {
    auto a = generate_mixture(two_topics({{0.9, 0.1}, {0.1, 0.9}}));
    auto b = generate_mixture(two_topics({{0.9, 0.1}, {0.1, 0.9}}));
    auto c = generate_mixture(two_topics({{0.9, 0.1}, {0.1, 0.9}}, 4));
    ASSERT_EQ(a.corpus.num_periods(), 2u);
    bool differs = false;
    for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t d = 0; d < a.corpus.documents[p].size(); ++d) {
            ASSERT_EQ(a.corpus.documents[p][d].tokens, b.corpus.documents[p][d].tokens);
            differs |= a.corpus.documents[p][d].tokens != c.corpus.documents[p][d].tokens;
        }
    EXPECT_TRUE(differs);
}

TEST(GenerateMixture, ShiftMovesTopicShare) {
    auto g = generate_mixture(two_topics({{0.9, 0.1}, {0.1, 0.9}}));
    for (std::size_t p = 0; p < 2; ++p) {
        double a = 0, n = 0;
        for (const auto& d : g.labels[p])
            for (auto l : d) {
                a += l == 0;
                ++n;
            }
        EXPECT_NEAR(a / n, p == 0 ? 0.9 : 0.1, 0.1);
    }
}

// Word frequencies within a topic stay within 3 sigma of the multinomial expectation.
TEST(GenerateMixture, PropertyWordFrequenciesWithinThreeSigma) {
    auto spec = two_topics({{0.5, 0.5}});
    spec.docs_per_period = 200;
    auto g = generate_mixture(spec);
    for (std::size_t k = 0; k < 2; ++k) {
        std::vector<double> counts(20, 0.0);
        double n = 0;
        for (std::size_t d = 0; d < g.labels[0].size(); ++d)
            for (std::size_t i = 0; i < g.labels[0][d].size(); ++i) {
                if (g.labels[0][d][i] != k) continue;
                auto w = g.corpus.vocab.word(g.corpus.documents[0][d].tokens[i]);
                auto pos = std::find(spec.topics[k].words.begin(), spec.topics[k].words.end(), w);
                counts[static_cast<std::size_t>(pos - spec.topics[k].words.begin())] += 1;
                ++n;
            }
        double z = 0;
        for (double v : spec.topics[k].weights) z += v;
        for (std::size_t i = 0; i < 20; ++i) {
            double p = spec.topics[k].weights[i] / z;
            EXPECT_LE(std::abs(counts[i] - n * p), 3 * std::sqrt(n * p * (1 - p))) << k << " " << i;
        }
    }
}

TEST(GenerateMixture, InvalidSpecIsConfigError) {
    EXPECT_THROW(generate_mixture(two_topics({{0.5, 0.6}})), ConfigError);
    EXPECT_THROW(generate_mixture(two_topics({{1.5, -0.5}})), ConfigError);
    auto s = two_topics({{1.0, 0.0}});
    s.topics[0].weights.pop_back();
    EXPECT_THROW(generate_mixture(s), ConfigError);
}

TEST(MakeWords, LetterOnlyAndDistinct) {
    auto w = make_words("t", 800);
    std::set<std::string> unique(w.begin(), w.end());
    EXPECT_EQ(unique.size(), 800u);
    for (const auto& s : w) {
        auto bare = strip_target_marker(s);
        EXPECT_GE(bare.size(), 3u);
        EXPECT_TRUE(std::all_of(bare.begin(), bare.end(), [](char c) { return c >= 'a' && c <= 'z'; }));
    }
}

TEST(Schedule, LinearAndSCurve) {
    auto lin = ReplacementSchedule::linear("town_n", "townx_n", 11);
    ASSERT_EQ(lin.proportions.size(), 11u);
    EXPECT_EQ(lin.proportions.front(), 0.0);
    EXPECT_EQ(lin.proportions.back(), 1.0);
    EXPECT_NEAR(lin.proportions[1], 0.1, 1e-12);
    auto s = ReplacementSchedule::s_curve("a", "b", 9, 1.5);
    EXPECT_NEAR(s.proportions.front(), 0.0, 1e-12);
    EXPECT_NEAR(s.proportions.back(), 1.0, 1e-12);
    EXPECT_NEAR(s.proportions[4], 0.5, 1e-12);
    for (std::size_t i = 1; i < 9; ++i) EXPECT_GT(s.proportions[i], s.proportions[i - 1]);
}

TEST(ReplacementCount, HalfUp) {
    EXPECT_EQ(replacement_count(0.1, 1000), 100u);
    EXPECT_EQ(replacement_count(0.5, 1), 1u);
    EXPECT_EQ(replacement_count(0.25, 2), 1u);
    EXPECT_EQ(replacement_count(0.0, 7), 0u);
    EXPECT_EQ(replacement_count(1.0, 7), 7u);
}

TEST(InjectSynonym, ScheduleCountsAndConservation) {
    auto c = word_corpus("town_n", 1000, 11);
    auto sched = ReplacementSchedule::linear("town_n", "townx_n", 11);
    auto out = inject_synonym(c, sched, 5);
    auto before = count_frequencies(c), after = count_frequencies(out);
    EXPECT_EQ(after.raw("townx_n", 0), 0u);
    EXPECT_EQ(after.raw("townx_n", 1), 100u);
    EXPECT_EQ(after.raw("town_n", 10), 0u);
    EXPECT_EQ(after.raw("townx_n", 10), 1000u);
    for (std::size_t p = 0; p < 11; ++p) {
        EXPECT_EQ(after.total(p), before.total(p));
        EXPECT_EQ(after.raw("town_n", p) + after.raw("townx_n", p), before.raw("town_n", p));
        EXPECT_EQ(after.raw("filler", p), before.raw("filler", p));
    }
    auto again = inject_synonym(c, sched, 5);
    EXPECT_EQ(again.documents[5][0].tokens, out.documents[5][0].tokens);
}

TEST(InjectSynonym, Errors) {
    auto c = word_corpus("town_n", 10, 2);
    EXPECT_THROW(inject_synonym(c, ReplacementSchedule::linear("town_n", "filler", 2), 1), ConfigError);
    EXPECT_THROW(inject_synonym(c, ReplacementSchedule::linear("city_n", "cityx_n", 2), 1), LookupError);
    EXPECT_THROW(inject_synonym(c, ReplacementSchedule::linear("town_n", "townx_n", 3), 1), ConfigError);
}

TEST(ShufflePeriod, PreservesCountsAndIsDeterministic) {
    auto g = generate_mixture(two_topics({{0.9, 0.1}, {0.1, 0.9}}));
    auto s1 = shuffle_period(g.corpus, 1, 9);
    auto s2 = shuffle_period(g.corpus, 1, 9);
    auto before = count_frequencies(g.corpus), after = count_frequencies(s1);
    for (const auto& w : before.words()) EXPECT_EQ(before.pmw_series(w), after.pmw_series(w));
    for (std::size_t d = 0; d < g.corpus.documents[1].size(); ++d) {
        EXPECT_EQ(s1.documents[1][d].tokens.size(), g.corpus.documents[1][d].tokens.size());
        EXPECT_EQ(s1.documents[1][d].tokens, s2.documents[1][d].tokens);
        EXPECT_EQ(s1.documents[0][d].tokens, g.corpus.documents[0][d].tokens);
    }
    bool moved = false;
    for (std::size_t d = 0; d < g.corpus.documents[1].size(); ++d)
        moved |= s1.documents[1][d].tokens != g.corpus.documents[1][d].tokens;
    EXPECT_TRUE(moved);
    EXPECT_THROW(shuffle_period(g.corpus, 2, 1), LookupError);
}

TEST(MixtureJson, ExplicitAndGeneratedTopics) {
    auto j = nlohmann::json::parse(R"({
        "periods": ["A", "B"], "mixture": [[1, 0], [0.5, 0.5]], "docs_per_period": 3,
        "doc_length": [10, 10], "block_length": 5, "seed": 2,
        "topics": [{"name": "sea", "words": ["ship_n", "sail"], "weights": [2, 1]},
                   {"name": "land", "size": 5, "zipf": 1.2}]})");
    auto s = mixture_from_json(j);
    EXPECT_EQ(s.topics[1].words.size(), 5u);
    auto g = generate_mixture(s);
    EXPECT_EQ(g.corpus.token_totals, (std::vector<std::uint64_t>{30, 30}));
    auto bad = j;
    bad["mixture"] = {{0.2, 0.2}, {0.5, 0.5}};
    EXPECT_THROW(mixture_from_json(bad), ConfigError);
    EXPECT_THROW(mixture_from_json(nlohmann::json::parse("{}")), ConfigError);
}
