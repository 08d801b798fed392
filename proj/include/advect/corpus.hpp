#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "advect/error.hpp"

namespace advect {

/// Suffix appended to tokens of the target POS class (common nouns by default),
/// so that a noun and a homographic verb are counted as different words.
inline constexpr std::string_view kTargetMarker = "_n";

/// Replacement for every digit run inside a retained token.
inline constexpr std::string_view kNumberPlaceholder = "<num>";

using WordId = std::uint32_t;

inline bool is_target_token(std::string_view token) {
    return token.size() > kTargetMarker.size() && token.ends_with(kTargetMarker);
}

inline std::string strip_target_marker(std::string_view token) {
    if (is_target_token(token)) token.remove_suffix(kTargetMarker.size());
    return std::string(token);
}

/// Interns word strings to dense ids.
class Vocabulary {
public:
    WordId intern(std::string_view word) {
        auto it = index_.find(std::string(word));
        if (it != index_.end()) return it->second;
        auto id = static_cast<WordId>(words_.size());
        words_.emplace_back(word);
        index_.emplace(words_.back(), id);
        return id;
    }

    std::optional<WordId> find(std::string_view word) const {
        auto it = index_.find(std::string(word));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    WordId at(std::string_view word) const {
        auto id = find(word);
        if (!id) throw LookupError("unknown word '" + std::string(word) + "'");
        return *id;
    }

    const std::string& word(WordId id) const { return words_.at(id); }
    std::size_t size() const noexcept { return words_.size(); }
    const std::vector<std::string>& words() const noexcept { return words_; }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, WordId> index_;
};

struct RawToken {
    std::string form;
    std::optional<std::string> lemma;
    std::optional<std::string> pos;
};

struct RawDocument {
    std::vector<RawToken> tokens;
    std::string period;
    std::string genre;
    std::string source;
};

struct FilterConfig {
    std::set<std::string> stopwords;
    std::set<std::string> ocr_errors;
    /// Tag prefixes (case-insensitive) of content words. Defaults follow CLAWS-style
    /// tags: lexical nouns, lexical verbs and adjectives.
    std::vector<std::string> content_pos{"nn", "vv", "jj"};
    std::size_t min_length = 3;
    bool drop_capitalized = true;
    /// Tag prefixes of the class that receives the target marker. "nn" covers common
    /// nouns (nn1, nn2, ...) but not proper nouns (np*).
    std::vector<std::string> target_pos{"nn"};
    /// Count lemmas instead of surface forms when the corpus provides them.
    bool use_lemma = false;

    void validate() const {
        if (min_length < 1) throw ConfigError("min word length must be at least 1");
    }
};

struct CleanDocument {
    std::vector<std::string> tokens;
    std::string period;
    std::string genre;
    std::string source;
};

namespace detail {

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline bool has_tag_prefix(std::string_view tag, const std::vector<std::string>& prefixes) {
    auto lower = to_lower(tag);
    return std::any_of(prefixes.begin(), prefixes.end(), [&](const std::string& p) {
        return lower.starts_with(to_lower(p));
    });
}

inline std::string replace_digit_runs(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            out += kNumberPlaceholder;
        } else {
            out += s[i++];
        }
    }
    return out;
}

} // namespace detail

/// Normalizes one token; returns nothing when the token is filtered out.
inline std::optional<std::string> normalize_token(const RawToken& tok, const FilterConfig& cfg) {
    bool target = false;
    std::string_view surface = tok.form;
    std::string unmarked;
    if (tok.pos) {
        if (!detail::has_tag_prefix(*tok.pos, cfg.content_pos)) return std::nullopt;
        target = detail::has_tag_prefix(*tok.pos, cfg.target_pos);
    } else if (is_target_token(surface)) {
        // already-cleaned input: the marker stands in for the tag
        unmarked = strip_target_marker(surface);
        surface = unmarked;
        target = true;
    }
    if (surface.empty()) return std::nullopt;
    if (cfg.drop_capitalized && std::isupper(static_cast<unsigned char>(surface.front())))
        return std::nullopt;

    std::string_view chosen = surface;
    if (cfg.use_lemma && tok.lemma && !tok.lemma->empty() && unmarked.empty()) chosen = *tok.lemma;

    std::string word = detail::to_lower(chosen);
    if (cfg.stopwords.count(word) || cfg.ocr_errors.count(word)) return std::nullopt;
    std::erase(word, '-');
    if (std::none_of(word.begin(), word.end(), [](unsigned char c) { return std::isalpha(c); }))
        return std::nullopt;
    word = detail::replace_digit_runs(word);
    if (cfg.stopwords.count(word) || cfg.ocr_errors.count(word)) return std::nullopt;
    if (word.size() < cfg.min_length) return std::nullopt;
    if (target) word += kTargetMarker;
    return word;
}

inline CleanDocument preprocess(const RawDocument& doc, const FilterConfig& cfg) {
    cfg.validate();
    CleanDocument out{{}, doc.period, doc.genre, doc.source};
    out.tokens.reserve(doc.tokens.size());
    for (const auto& tok : doc.tokens)
        if (auto w = normalize_token(tok, cfg)) out.tokens.push_back(std::move(*w));
    return out;
}

/// Lifts a cleaned document back to raw form (tokens without tags).
inline RawDocument as_raw(const CleanDocument& doc) {
    RawDocument raw{{}, doc.period, doc.genre, doc.source};
    raw.tokens.reserve(doc.tokens.size());
    for (const auto& t : doc.tokens) raw.tokens.push_back({t, std::nullopt, std::nullopt});
    return raw;
}

struct Document {
    std::vector<WordId> tokens;
    std::string genre;
    std::string source;
};

/// Token streams of the documents feeding one estimation step. Spans never cross
/// document boundaries.
using DocumentViews = std::vector<std::span<const WordId>>;

/// Cleaned documents binned into ordered periods over a shared vocabulary.
struct PeriodCorpus {
    Vocabulary vocab;
    std::vector<std::string> periods;
    std::vector<std::vector<Document>> documents;
    std::vector<std::uint64_t> token_totals;
    std::vector<std::map<std::string, std::uint64_t>> genre_totals;

    std::size_t num_periods() const noexcept { return periods.size(); }

    std::size_t period_index(std::string_view id) const {
        auto it = std::find(periods.begin(), periods.end(), id);
        if (it == periods.end()) throw LookupError("unknown period '" + std::string(id) + "'");
        return static_cast<std::size_t>(it - periods.begin());
    }

    std::uint64_t total_tokens() const {
        std::uint64_t n = 0;
        for (auto t : token_totals) n += t;
        return n;
    }

    /// Recomputes per-period token and genre totals from the documents.
    void recompute_totals() {
        token_totals.assign(periods.size(), 0);
        genre_totals.assign(periods.size(), {});
        for (std::size_t p = 0; p < periods.size(); ++p) {
            for (const auto& d : documents[p]) {
                token_totals[p] += d.tokens.size();
                if (!d.genre.empty()) genre_totals[p][d.genre] += d.tokens.size();
            }
        }
    }

    /// All genre labels in use, sorted.
    std::vector<std::string> genres() const {
        std::set<std::string> g;
        for (const auto& m : genre_totals)
            for (const auto& [name, n] : m) g.insert(name);
        return {g.begin(), g.end()};
    }

    /// Creates an empty corpus with the given period order.
    static PeriodCorpus with_periods(std::vector<std::string> order) {
        std::set<std::string> seen;
        for (const auto& p : order)
            if (!seen.insert(p).second) throw ConfigError("duplicate period '" + p + "'");
        PeriodCorpus c;
        c.periods = std::move(order);
        c.documents.resize(c.periods.size());
        c.recompute_totals();
        return c;
    }
};

inline PeriodCorpus bin_periods(const std::vector<CleanDocument>& docs,
                                const std::vector<std::string>& period_order) {
    auto corpus = PeriodCorpus::with_periods(period_order);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < period_order.size(); ++i) index.emplace(period_order[i], i);
    for (const auto& d : docs) {
        auto it = index.find(d.period);
        if (it == index.end())
            throw ConfigError("document '" + d.source + "' has undeclared period '" + d.period + "'");
        Document out{{}, d.genre, d.source};
        out.tokens.reserve(d.tokens.size());
        for (const auto& t : d.tokens) out.tokens.push_back(corpus.vocab.intern(t));
        corpus.documents[it->second].push_back(std::move(out));
    }
    corpus.recompute_totals();
    return corpus;
}

/// Documents of periods first..last (inclusive) as views.
inline DocumentViews concat_periods(const PeriodCorpus& corpus, std::size_t first, std::size_t last) {
    if (first > last || last >= corpus.num_periods())
        throw ConfigError("invalid period range " + std::to_string(first) + ".." + std::to_string(last));
    DocumentViews views;
    for (std::size_t p = first; p <= last; ++p)
        for (const auto& d : corpus.documents[p]) views.emplace_back(d.tokens);
    return views;
}

/// Period t together with its predecessor; the first period stands alone.
inline DocumentViews concat_adjacent(const PeriodCorpus& corpus, std::size_t t) {
    return concat_periods(corpus, t == 0 ? 0 : t - 1, t);
}

/// How topic-estimation data is pooled across periods.
struct Smoothing {
    enum class Kind { none, adjacent, window };
    Kind kind = Kind::none;
    std::size_t width = 1;

    static Smoothing none() { return {Kind::none, 1}; }
    static Smoothing adjacent() { return {Kind::adjacent, 2}; }
    static Smoothing window(std::size_t n) {
        if (n < 1) throw ConfigError("smoothing window must be at least 1");
        return {Kind::window, n};
    }

    /// Parses "none", "adjacent" or "window:N".
    static Smoothing parse(std::string_view s) {
        if (s == "none") return none();
        if (s == "adjacent") return adjacent();
        if (s.starts_with("window:")) {
            auto rest = std::string(s.substr(7));
            std::size_t pos = 0;
            long n = 0;
            try {
                n = std::stol(rest, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != rest.size() || n < 1) throw ConfigError("bad smoothing window '" + std::string(s) + "'");
            return window(static_cast<std::size_t>(n));
        }
        throw ConfigError("unknown smoothing mode '" + std::string(s) + "'");
    }

    std::string name() const {
        switch (kind) {
        case Kind::none: return "none";
        case Kind::adjacent: return "adjacent";
        case Kind::window: return "window:" + std::to_string(width);
        }
        return {};
    }

    /// First period of the pooled range ending at t.
    std::size_t first_period(std::size_t t) const { return t + 1 >= width ? t + 1 - width : 0; }
};

inline DocumentViews topic_dataset(const PeriodCorpus& corpus, std::size_t t, const Smoothing& s) {
    return concat_periods(corpus, s.first_period(t), t);
}

} // namespace advect
