#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "advect/corpus.hpp"
#include "advect/corpus_io.hpp"

namespace fs = std::filesystem;
using namespace advect;

namespace {

RawToken tagged(std::string form, std::string pos) { return {std::move(form), std::nullopt, std::move(pos)}; }
RawToken plain(std::string form) { return {std::move(form), std::nullopt, std::nullopt}; }

RawDocument doc_of(std::vector<RawToken> toks) { return {std::move(toks), "p", "", "test"}; }

class TempDir {
public:
    TempDir() {
        static int n = 0;
        path_ = fs::temp_directory_path() / ("advect_corpus_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    void write(const std::string& rel, const std::string& body) const {
        fs::create_directories((path_ / rel).parent_path());
        std::ofstream(path_ / rel) << body;
    }

private:
    fs::path path_;
};

} // namespace

TEST(Preprocess, NounsOnlyDropsVerbAndCapitalized) {
    FilterConfig cfg;
    cfg.content_pos = {"nn"};
    auto d = doc_of({tagged("The", "at"), tagged("Navy", "nn1"), tagged("arrived", "vvd"), tagged("quickly", "rr")});
    EXPECT_TRUE(preprocess(d, cfg).tokens.empty());
}

TEST(Preprocess, VerbsAllowedAsContext) {
    FilterConfig cfg;
    cfg.content_pos = {"nn", "vv"};
    auto d = doc_of({tagged("The", "at"), tagged("Navy", "nn1"), tagged("arrived", "vvd"), tagged("quickly", "rr")});
    EXPECT_EQ(preprocess(d, cfg).tokens, std::vector<std::string>{"arrived"});
}

TEST(Preprocess, HyphensRemovedAndNounMarked) {
    FilterConfig cfg;
    auto out = preprocess(doc_of({tagged("self-efficacy", "nn1")}), cfg);
    ASSERT_EQ(out.tokens.size(), 1u);
    EXPECT_EQ(out.tokens[0], "selfefficacy" + std::string(kTargetMarker));
}

TEST(Preprocess, DigitRunsBecomePlaceholder) {
    FilterConfig cfg;
    EXPECT_EQ(preprocess(doc_of({plain("b2b")}), cfg).tokens, std::vector<std::string>{"b<num>b"});
    EXPECT_EQ(preprocess(doc_of({plain("a1234x")}), cfg).tokens, std::vector<std::string>{"a<num>x"});
    // a bare number is not a word
    EXPECT_TRUE(preprocess(doc_of({plain("1990")}), cfg).tokens.empty());
}

TEST(Preprocess, StopwordsOcrAndLength) {
    FilterConfig cfg;
    cfg.stopwords = {"would"};
    cfg.ocr_errors = {"tbe"};
    auto out = preprocess(doc_of({plain("would"), plain("tbe"), plain("an"), plain("ship")}), cfg);
    EXPECT_EQ(out.tokens, std::vector<std::string>{"ship"});
}

TEST(Preprocess, CapitalizationKeptWhenDisabled) {
    FilterConfig cfg;
    cfg.drop_capitalized = false;
    EXPECT_EQ(preprocess(doc_of({plain("Ship")}), cfg).tokens, std::vector<std::string>{"ship"});
}

TEST(Preprocess, LemmaSwitch) {
    FilterConfig cfg;
    RawToken t{"ships", std::string("ship"), std::string("nn2")};
    EXPECT_EQ(preprocess(doc_of({t}), cfg).tokens[0], "ships" + std::string(kTargetMarker));
    cfg.use_lemma = true;
    EXPECT_EQ(preprocess(doc_of({t}), cfg).tokens[0], "ship" + std::string(kTargetMarker));
}

TEST(Preprocess, InvalidConfig) {
    FilterConfig cfg;
    cfg.min_length = 0;
    EXPECT_THROW(preprocess(doc_of({plain("ship")}), cfg), ConfigError);
}

// Idempotence and the retained-token guarantees over random token soups.
TEST(Preprocess, PropertyIdempotentAndClean) {
    std::mt19937_64 rng(7);
    const std::vector<std::string> pieces{"ab", "Cd", "e-f", "12", "x9y", "ship", "THE", "would", "ox", "-", "q"};
    const std::vector<std::string> tags{"nn1", "vvd", "jj", "at", "rr", "np1", "mc"};
    FilterConfig cfg;
    cfg.stopwords = {"would", "the"};
    for (int iter = 0; iter < 300; ++iter) {
        RawDocument d{{}, "p", "", "gen"};
        std::size_t n = rng() % 20;
        for (std::size_t i = 0; i < n; ++i) {
            std::string form = pieces[rng() % pieces.size()] + pieces[rng() % pieces.size()];
            if (rng() % 2) d.tokens.push_back(tagged(form, tags[rng() % tags.size()]));
            else d.tokens.push_back(plain(form));
        }
        auto once = preprocess(d, cfg);
        auto twice = preprocess(as_raw(once), cfg);
        ASSERT_EQ(once.tokens, twice.tokens);
        for (const auto& t : once.tokens) {
            auto bare = strip_target_marker(t);
            EXPECT_EQ(cfg.stopwords.count(bare), 0u) << t;
            EXPECT_GE(bare.size(), cfg.min_length) << t;
            EXPECT_EQ(t.find_first_of("0123456789"), std::string::npos) << t;
        }
    }
}

TEST(ParseVertical, SplitsOnDelimiterLines) {
    TempDir dir;
    dir.write("a.vrt", "##1\nship\tship\tnn1\nsails\tsail\tvvz\n##2\nharbour\tharbour\tnn1\n");
    auto docs = parse_vertical(dir.path() / "a.vrt", "1900");
    ASSERT_EQ(docs.size(), 2u);
    EXPECT_EQ(docs[0].tokens.size(), 2u);
    EXPECT_EQ(docs[0].tokens[1].lemma.value(), "sail");
    EXPECT_EQ(docs[1].tokens[0].form, "harbour");
    EXPECT_EQ(docs[1].period, "1900");
}

TEST(ParseVertical, WrongFieldCountReportsLine) {
    TempDir dir;
    dir.write("bad.vrt", "##\nship\tship\tnn1\nbroken\tline\n");
    try {
        parse_vertical(dir.path() / "bad.vrt", "1900");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(ParseVertical, MissingFileIsIngestError) {
    try {
        parse_vertical("/nonexistent/file.vrt", "1900");
        FAIL();
    } catch (const IngestError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/file.vrt"), std::string::npos);
    }
}

TEST(ParsePlain, OneFileOneDocument) {
    TempDir dir;
    dir.write("a.txt", "The ship, sailed.\nHome again!");
    auto d = parse_plain(dir.path() / "a.txt", "1900");
    ASSERT_EQ(d.tokens.size(), 5u);
    EXPECT_EQ(d.tokens[1].form, "ship");
    EXPECT_EQ(d.tokens[4].form, "again");
}

TEST(Manifest, DirectoryMapsToPeriod) {
    TempDir dir;
    for (int i = 0; i < 3; ++i) dir.write("1900s/f" + std::to_string(i) + ".txt", "ship harbour sail");
    dir.write("manifest.json",
              R"({"format": "plain", "periods": ["1900"], "inputs": [{"period": "1900", "glob": "1900s/"}]})");
    auto m = Manifest::load(dir.path() / "manifest.json");
    auto docs = parse_corpus(m);
    ASSERT_EQ(docs.size(), 3u);
    for (const auto& d : docs) EXPECT_EQ(d.period, "1900");
}

TEST(Manifest, EntryWithoutPeriodIsConfigError) {
    auto j = nlohmann::json::parse(R"({"inputs": [{"glob": "x/*.txt"}]})");
    EXPECT_THROW(Manifest::from_json(j), ConfigError);
}

TEST(Manifest, UnmatchedGlobIsConfigError) {
    TempDir dir;
    auto j = nlohmann::json::parse(R"({"inputs": [{"period": "1900", "glob": "none/*.txt"}]})");
    auto m = Manifest::from_json(j, dir.path());
    EXPECT_THROW(parse_corpus(m), ConfigError);
}

TEST(BinPeriods, TotalsAndGenres) {
    std::vector<CleanDocument> docs{
        {{"aaa", "bbb"}, "A", "acad", "1"},
        {{"ccc"}, "B", "spok", "2"},
        {{"aaa", "ddd", "eee"}, "A", "spok", "3"},
        {{"bbb"}, "B", "spok", "4"},
    };
    auto c = bin_periods(docs, {"A", "B", "C"});
    ASSERT_EQ(c.num_periods(), 3u);
    EXPECT_EQ(c.token_totals, (std::vector<std::uint64_t>{5, 2, 0}));
    EXPECT_EQ(c.genre_totals[0].at("acad"), 2u);
    EXPECT_EQ(c.genre_totals[0].at("spok"), 3u);
    EXPECT_EQ(c.genre_totals[1].at("spok"), 2u);
    EXPECT_TRUE(c.documents[2].empty());
    EXPECT_EQ(c.total_tokens(), 7u);
    EXPECT_EQ(c.genres(), (std::vector<std::string>{"acad", "spok"}));
}

TEST(BinPeriods, UnknownPeriod) {
    std::vector<CleanDocument> docs{{{"aaa"}, "Z", "", "1"}};
    EXPECT_THROW(bin_periods(docs, {"A"}), ConfigError);
    EXPECT_THROW(bin_periods({}, {"A", "A"}), ConfigError);
}

TEST(ConcatAdjacent, FirstPeriodAloneOtherwisePair) {
    std::vector<CleanDocument> docs{{{"aaa"}, "1910", "", "1"}, {{"bbb", "ccc"}, "1920", "", "2"},
                                    {{"ddd"}, "1930", "", "3"}};
    auto c = bin_periods(docs, {"1910", "1920", "1930"});
    EXPECT_EQ(concat_adjacent(c, 0).size(), 1u);
    auto pair = concat_adjacent(c, 1);
    ASSERT_EQ(pair.size(), 2u);
    EXPECT_EQ(pair[0].size(), 1u);
    EXPECT_EQ(pair[1].size(), 2u);
    EXPECT_EQ(topic_dataset(c, 2, Smoothing::window(4)).size(), 3u);
    EXPECT_EQ(topic_dataset(c, 2, Smoothing::none()).size(), 1u);
}

TEST(Smoothing, Parse) {
    EXPECT_EQ(Smoothing::parse("none").width, 1u);
    EXPECT_EQ(Smoothing::parse("adjacent").width, 2u);
    EXPECT_EQ(Smoothing::parse("window:4").width, 4u);
    EXPECT_EQ(Smoothing::parse("window:4").name(), "window:4");
    EXPECT_THROW(Smoothing::parse("window:0"), ConfigError);
    EXPECT_THROW(Smoothing::parse("window:x"), ConfigError);
    EXPECT_THROW(Smoothing::parse("weekly"), ConfigError);
}

TEST(CorpusCache, RoundTripPreservesDocuments) {
    std::vector<CleanDocument> docs{{{"aaa", "bbb_n"}, "A", "acad", "x.txt"}, {{"ccc"}, "B", "", "y.txt"}};
    auto c = bin_periods(docs, {"A", "B", "C"});
    std::stringstream ss;
    save_corpus(c, ss);
    auto back = load_corpus(ss);
    EXPECT_EQ(back.periods, c.periods);
    EXPECT_EQ(back.token_totals, c.token_totals);
    EXPECT_EQ(back.genre_totals, c.genre_totals);
    ASSERT_EQ(back.documents[0].size(), 1u);
    EXPECT_EQ(back.vocab.word(back.documents[0][0].tokens[1]), "bbb_n");
}

TEST(CorpusCache, MissingCacheIsMissingArtifact) {
    EXPECT_THROW(load_corpus(fs::path("/nonexistent/corpus.txt")), MissingArtifactError);
}

TEST(CorpusStats, Csv) {
    std::vector<CleanDocument> docs{{{"aaa", "bbb", "aaa"}, "A", "acad", "1"}, {{"ccc"}, "A", "spok", "2"}};
    auto c = bin_periods(docs, {"A"});
    std::ostringstream out;
    write_corpus_stats(c, out);
    EXPECT_EQ(out.str(), "period,genre,tokens,types\nA,all,4,3\nA,acad,3,2\nA,spok,1,1\n");
}

TEST(VerticalExport, ReingestsToSameTokens) {
    TempDir dir;
    std::vector<CleanDocument> docs{{{"ship_n", "sail", "harbour_n"}, "A", "", "1"},
                                    {{"crew_n", "b<num>b"}, "B", "", "2"}};
    auto c = bin_periods(docs, {"A", "B"});
    write_vertical_corpus(c, dir.path() / "out");
    auto back = ingest(Manifest::load(dir.path() / "out" / "manifest.json"), FilterConfig{});
    ASSERT_EQ(back.num_periods(), 2u);
    ASSERT_EQ(back.documents[0].size(), 1u);
    std::vector<std::string> words;
    for (auto id : back.documents[0][0].tokens) words.push_back(back.vocab.word(id));
    EXPECT_EQ(words, (std::vector<std::string>{"ship_n", "sail", "harbour_n"}));
    EXPECT_EQ(back.vocab.word(back.documents[1][0].tokens[1]), "b<num>b");
}
