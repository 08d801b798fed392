#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "advect/corpus.hpp"
#include "advect/counts.hpp"

using namespace advect;

TEST(LogChange, AppendixTableValues) {
    EXPECT_NEAR(log_change(10, 100), 2.30, 0.005);
    EXPECT_NEAR(log_change(100, 1), -4.61, 0.005);
}

TEST(LogChange, BothZeroIsExactlyZero) {
    EXPECT_EQ(log_change(0, 0, SmoothingRule{3.0}, SmoothingRule{7.0}), 0.0);
}

TEST(LogChange, ZeroSideUsesItsOwnUnit) {
    // ln(3) - ln(1), computed by hand
    EXPECT_NEAR(log_change(0, 3, SmoothingRule{1.0}), 1.0986122886681098, 1e-12);
    // the previous side is zero and borrows 0.5; the current side stays untouched
    EXPECT_NEAR(log_change(0, 3, SmoothingRule{0.5}, SmoothingRule{100.0}), std::log(3.0 / 0.5), 1e-12);
    EXPECT_NEAR(log_change(3, 0, SmoothingRule{100.0}, SmoothingRule{0.5}), std::log(0.5 / 3.0), 1e-12);
}

TEST(LogChange, NegativeInputIsDomainError) {
    EXPECT_THROW(log_change(-1, 2), DomainError);
    EXPECT_THROW(log_change(1, -2), DomainError);
    EXPECT_THROW(log_change(0, 2, SmoothingRule{0.0}), DomainError);
}

TEST(LogChange, PropertyAntisymmetryAdditivityScale) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1e-3, 1e4), k(1e-3, 1e3);
    for (int i = 0; i < 2000; ++i) {
        double a = u(rng), b = u(rng), c = u(rng), s = k(rng);
        EXPECT_NEAR(log_change(a, b), -log_change(b, a), 1e-9);
        EXPECT_NEAR(log_change(a, b) + log_change(b, c), log_change(a, c), 1e-9);
        EXPECT_NEAR(log_change(s * a, s * b), log_change(a, b), 1e-9);
    }
}

TEST(ChangeMeasures, AppendixColumns) {
    auto m = change_measures(1, 100);
    EXPECT_EQ(m.absolute, 99);
    EXPECT_NEAR(*m.percent, 9900, 1e-9);
    EXPECT_NEAR(*m.ln, 4.61, 0.005);
    EXPECT_NEAR(*m.log10, 2, 1e-12);
    m = change_measures(10, 5);
    EXPECT_EQ(m.absolute, -5);
    EXPECT_NEAR(*m.percent, -50, 1e-9);
    EXPECT_NEAR(*m.ln, -0.69, 0.005);
    EXPECT_NEAR(*m.log10, -0.30, 0.005);
    m = change_measures(5, 5);
    EXPECT_EQ(m.absolute, 0);
    EXPECT_EQ(*m.percent, 0);
    EXPECT_EQ(*m.ln, 0);
    EXPECT_EQ(*m.log10, 0);
}

TEST(ChangeMeasures, PercentFromZeroUndefined) {
    auto m = change_measures(0, 5);
    EXPECT_EQ(m.absolute, 5);
    EXPECT_FALSE(m.percent.has_value());
    EXPECT_FALSE(m.ln.has_value());
    EXPECT_THROW(change_measures(-1, 5), DomainError);
}

namespace {

PeriodCorpus corpus_of(const std::vector<std::vector<std::string>>& periods) {
    std::vector<CleanDocument> docs;
    std::vector<std::string> order;
    for (std::size_t p = 0; p < periods.size(); ++p) {
        order.push_back("p" + std::to_string(p));
        docs.push_back({periods[p], order.back(), "", "d"});
    }
    return bin_periods(docs, order);
}

} // namespace

TEST(CountFrequencies, PmwNormalization) {
    FrequencyTable t({"A", "B"}, {500000, 1000000});
    t.set_counts("ship", {50, 50});
    EXPECT_DOUBLE_EQ(t.pmw("ship", 0), 100.0);
    EXPECT_DOUBLE_EQ(t.pmw("ship", 1), 50.0);
    FrequencyTable one({"A"}, {1000000});
    one.set_counts("payment", {69});
    EXPECT_DOUBLE_EQ(one.pmw("payment", 0), 69.0);
}

TEST(CountFrequencies, FromCorpusAndClassFilter) {
    auto c = corpus_of({{"ship_n", "sail", "ship_n", "crew_n"}, {"sail", "sail"}});
    auto all = count_frequencies(c);
    EXPECT_EQ(all.raw("ship_n", 0), 2u);
    EXPECT_EQ(all.raw("ship_n", 1), 0u);
    EXPECT_EQ(all.pmw("ship_n", 1), 0.0);
    EXPECT_DOUBLE_EQ(all.pmw("sail", 1), 1e6);
    auto nouns = count_frequencies(c, TokenClass::target);
    EXPECT_EQ(nouns.words(), (std::vector<std::string>{"crew_n", "ship_n"}));
    // totals come from the full stream
    EXPECT_DOUBLE_EQ(nouns.pmw("ship_n", 0), 2.0 / 4.0 * 1e6);
    // per-period raw sum equals the total over all tokens
    for (std::size_t p = 0; p < 2; ++p) {
        std::uint64_t s = 0;
        for (const auto& w : all.words()) s += all.raw(w, p);
        EXPECT_EQ(s, all.total(p));
    }
}

TEST(ChangeSeries, PaymentRows) {
    std::vector<double> pmw{69.2, 71.2, 151.5, 226.3, 118.3};
    std::vector<double> units(5, 1.0);
    auto c = change_series(pmw, units);
    std::vector<double> expected{+0.03, +0.75, +0.40, -0.64};
    ASSERT_EQ(c.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(c[i], expected[i], 0.01);
}

TEST(ChangeSeries, ConstantAndZeros) {
    std::vector<double> flat{5, 5, 5, 5}, units(4, 1.0);
    for (double v : change_series(flat, units)) EXPECT_EQ(v, 0.0);
    std::vector<double> z{0, 0, 8}, u3(3, 1.0);
    auto c = change_series(z, u3);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0], 0.0);
    EXPECT_NEAR(c[1], 2.0794415416798357, 1e-12);
}

TEST(ChangeSeries, FromTable) {
    FrequencyTable t({"A", "B", "C"}, {1000000, 1000000, 1000000});
    t.set_counts("ship", {0, 0, 8});
    auto s = change_series(t, "ship");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0].first, "B");
    EXPECT_EQ(s[0].second, 0.0);
    EXPECT_NEAR(s[1].second, std::log(8.0), 1e-12);
    EXPECT_THROW(change_series(t, "unknown"), LookupError);
}

TEST(ChangeSeries, EmptyPeriodBorrowsPartnerUnit) {
    FrequencyTable t({"A", "B", "C"}, {1000000, 0, 500000});
    t.set_counts("ship", {4, 0, 4});
    auto s = change_series(t, "ship");
    EXPECT_NEAR(s[0].second, std::log(1.0 / 4.0), 1e-12);
    EXPECT_NEAR(s[1].second, std::log(8.0 / 2.0), 1e-12);
}

TEST(FrequencyCsv, Layout) {
    FrequencyTable t({"A", "B"}, {2000000, 1000000});
    t.set_counts("zeta", {1, 0});
    t.set_counts("alpha", {2, 3});
    std::ostringstream out;
    write_frequency_csv(t, out);
    EXPECT_EQ(out.str(), "word,period,raw,pmw\nalpha,A,2,1\nalpha,B,3,3\nzeta,A,1,0.5\nzeta,B,0,0\n");
}
