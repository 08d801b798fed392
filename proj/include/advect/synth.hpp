#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "advect/corpus.hpp"
#include "advect/error.hpp"
#include "advect/random.hpp"

namespace advect::synth {

struct Topic {
    std::string name;
    std::vector<std::string> words;
    std::vector<double> weights;
    /// Optional per-period replacement for `weights` (index = period).
    std::vector<std::vector<double>> period_weights;

    const std::vector<double>& weights_at(std::size_t period) const {
        return period_weights.empty() ? weights : period_weights.at(period);
    }
};

/// Ground-truth topic mixture. Each document is a run of blocks; every block draws one
/// topic from its period's mixture and then `block_length` words from that topic.
struct MixtureSpec {
    std::vector<Topic> topics;
    std::vector<std::string> periods;
    std::vector<std::vector<double>> mixture; // [period][topic]
    std::size_t docs_per_period = 100;
    std::size_t doc_length_min = 500;
    std::size_t doc_length_max = 500;
    std::size_t block_length = 50;
    /// Label each document's genre with the topic of its first block.
    bool genre_by_topic = false;
    std::uint64_t seed = 1;

    void validate() const {
        if (topics.empty()) throw ConfigError("mixture needs at least one topic");
        if (mixture.size() != periods.size()) throw ConfigError("one mixture row per period required");
        for (const auto& row : mixture) {
            if (row.size() != topics.size()) throw ConfigError("mixture row must have one weight per topic");
            double s = 0.0;
            for (double w : row) {
                if (!(w >= 0.0) || w > 1.0) throw ConfigError("mixture weights must lie in [0, 1]");
                s += w;
            }
            if (std::abs(s - 1.0) > 1e-9) throw ConfigError("mixture weights of a period must sum to 1");
        }
        for (const auto& t : topics) {
            if (t.words.empty()) throw ConfigError("topic '" + t.name + "' has no words");
            auto check = [&](const std::vector<double>& w) {
                if (w.size() != t.words.size()) throw ConfigError("topic '" + t.name + "' weight count mismatch");
                double s = 0.0;
                for (double v : w) {
                    if (!(v >= 0.0)) throw ConfigError("topic '" + t.name + "' has a negative weight");
                    s += v;
                }
                if (!(s > 0.0)) throw ConfigError("topic '" + t.name + "' has all-zero weights");
            };
            if (t.period_weights.empty()) check(t.weights);
            else {
                if (t.period_weights.size() != periods.size())
                    throw ConfigError("topic '" + t.name + "' needs one weight row per period");
                for (const auto& w : t.period_weights) check(w);
            }
        }
        if (doc_length_min < 1 || doc_length_max < doc_length_min) throw ConfigError("bad document length range");
        if (block_length < 1) throw ConfigError("block length must be at least 1");
    }
};

/// Generated corpus plus the topic that produced every token.
struct SyntheticCorpus {
    PeriodCorpus corpus;
    std::vector<std::vector<std::vector<std::uint16_t>>> labels; // [period][doc][token]
};

/// `n` distinct lowercase letter-only words starting with `prefix`, optionally marked as
/// targets.
inline std::vector<std::string> make_words(const std::string& prefix, std::size_t n, bool marked = true) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::string s;
        std::size_t v = i;
        for (int d = 0; d < 3; ++d) {
            s.insert(s.begin(), static_cast<char>('a' + v % 26));
            v /= 26;
        }
        while (v > 0) {
            s.insert(s.begin(), static_cast<char>('a' + v % 26));
            v /= 26;
        }
        out.push_back(prefix + s + (marked ? std::string(kTargetMarker) : std::string()));
    }
    return out;
}

/// Weights proportional to 1 / (rank + offset)^exponent.
inline std::vector<double> zipf_weights(std::size_t n, double exponent = 1.0, double offset = 1.0) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i) + offset, exponent);
    return w;
}

inline SyntheticCorpus generate_mixture(const MixtureSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    SyntheticCorpus out;
    out.corpus = PeriodCorpus::with_periods(spec.periods);
    out.labels.resize(spec.periods.size());

    std::vector<std::vector<WordId>> ids(spec.topics.size());
    for (std::size_t k = 0; k < spec.topics.size(); ++k)
        for (const auto& w : spec.topics[k].words) ids[k].push_back(out.corpus.vocab.intern(w));

    for (std::size_t p = 0; p < spec.periods.size(); ++p) {
        auto topic_cdf = cumulative(spec.mixture[p]);
        std::vector<std::vector<double>> word_cdf;
        for (const auto& t : spec.topics) word_cdf.push_back(cumulative(t.weights_at(p)));
        for (std::size_t d = 0; d < spec.docs_per_period; ++d) {
            std::size_t len = spec.doc_length_min + rng.below(spec.doc_length_max - spec.doc_length_min + 1);
            Document doc;
            std::vector<std::uint16_t> labels;
            doc.tokens.reserve(len);
            std::size_t topic = 0;
            for (std::size_t i = 0; i < len; ++i) {
                if (i % spec.block_length == 0) topic = rng.pick_cumulative(topic_cdf);
                if (i == 0 && spec.genre_by_topic) doc.genre = spec.topics[topic].name;
                doc.tokens.push_back(ids[topic][rng.pick_cumulative(word_cdf[topic])]);
                labels.push_back(static_cast<std::uint16_t>(topic));
            }
            doc.source = "synth:" + spec.periods[p] + ":" + std::to_string(d);
            out.corpus.documents[p].push_back(std::move(doc));
            out.labels[p].push_back(std::move(labels));
        }
    }
    out.corpus.recompute_totals();
    return out;
}

enum class Shape { linear, s_curve };

/// Fraction of `word` occurrences replaced by `synonym` in each period.
struct ReplacementSchedule {
    std::string word;
    std::string synonym;
    std::vector<double> proportions;
    Shape shape = Shape::linear;

    /// 0 at the first period, 1 at the last, equal steps between.
    static ReplacementSchedule linear(std::string word, std::string synonym, std::size_t periods) {
        if (periods < 2) throw ConfigError("a schedule needs at least two periods");
        ReplacementSchedule s{std::move(word), std::move(synonym), {}, Shape::linear};
        for (std::size_t i = 0; i < periods; ++i)
            s.proportions.push_back(static_cast<double>(i) / static_cast<double>(periods - 1));
        return s;
    }

    /// Logistic curve around the middle period, rescaled to run from 0 to 1.
    static ReplacementSchedule s_curve(std::string word, std::string synonym, std::size_t periods,
                                       double steepness = 1.0) {
        if (periods < 2) throw ConfigError("a schedule needs at least two periods");
        if (!(steepness > 0.0)) throw ConfigError("s-curve steepness must be positive");
        ReplacementSchedule s{std::move(word), std::move(synonym), {}, Shape::s_curve};
        const double mid = static_cast<double>(periods - 1) / 2.0;
        auto logistic = [&](double i) { return 1.0 / (1.0 + std::exp(-steepness * (i - mid))); };
        const double lo = logistic(0.0), hi = logistic(static_cast<double>(periods - 1));
        for (std::size_t i = 0; i < periods; ++i)
            s.proportions.push_back((logistic(static_cast<double>(i)) - lo) / (hi - lo));
        return s;
    }
};

/// Number of occurrences replaced out of n: nearest integer, halves rounded up.
inline std::size_t replacement_count(double proportion, std::size_t n) {
    return static_cast<std::size_t>(std::floor(proportion * static_cast<double>(n) + 0.5));
}

/// Replaces a random subset of `word` tokens with a new synonym token, period by period.
inline PeriodCorpus inject_synonym(const PeriodCorpus& corpus, const ReplacementSchedule& schedule,
                                   std::uint64_t seed) {
    if (schedule.proportions.size() != corpus.num_periods())
        throw ConfigError("schedule needs one proportion per period");
    for (double p : schedule.proportions)
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("replacement proportions must lie in [0, 1]");
    auto word = corpus.vocab.find(schedule.word);
    if (!word) throw LookupError("word '" + schedule.word + "' not in corpus");
    if (corpus.vocab.find(schedule.synonym) || schedule.synonym == schedule.word)
        throw ConfigError("synonym '" + schedule.synonym + "' collides with an existing token");

    PeriodCorpus out = corpus;
    const WordId syn = out.vocab.intern(schedule.synonym);
    Rng rng(seed);
    for (std::size_t p = 0; p < out.num_periods(); ++p) {
        std::vector<WordId*> positions;
        for (auto& d : out.documents[p])
            for (auto& tok : d.tokens)
                if (tok == *word) positions.push_back(&tok);
        std::size_t r = replacement_count(schedule.proportions[p], positions.size());
        for (std::size_t i = 0; i < r; ++i) {
            std::size_t j = i + rng.below(positions.size() - i);
            std::swap(positions[i], positions[j]);
            *positions[i] = syn;
        }
    }
    out.recompute_totals();
    return out;
}

/// Permutes every token position of one period across its documents; document lengths
/// and the token multiset are unchanged.
inline PeriodCorpus shuffle_period(const PeriodCorpus& corpus, std::size_t period, std::uint64_t seed) {
    if (period >= corpus.num_periods()) throw LookupError("period index out of range");
    PeriodCorpus out = corpus;
    std::vector<WordId> pool;
    for (const auto& d : out.documents[period]) pool.insert(pool.end(), d.tokens.begin(), d.tokens.end());
    Rng rng(seed);
    rng.shuffle(pool);
    std::size_t k = 0;
    for (auto& d : out.documents[period])
        for (auto& tok : d.tokens) tok = pool[k++];
    return out;
}

/// Reads a mixture spec from JSON:
///   {"periods": [...], "mixture": [[...], ...], "docs_per_period": N,
///    "doc_length": [min, max], "block_length": B, "genre_by_topic": false, "seed": S,
///    "topics": [{"name": "a", "words": [...], "weights": [...]}  // or
///               {"name": "b", "size": 200, "zipf": 1.0}]}
/// Generated topic words are letter-only names prefixed by the topic name.
inline MixtureSpec mixture_from_json(const nlohmann::json& j) {
    MixtureSpec s;
    try {
        s.periods = j.at("periods").get<std::vector<std::string>>();
        s.mixture = j.at("mixture").get<std::vector<std::vector<double>>>();
        s.docs_per_period = j.value("docs_per_period", s.docs_per_period);
        if (j.contains("doc_length")) {
            auto len = j.at("doc_length").get<std::vector<std::size_t>>();
            if (len.size() != 2) throw ConfigError("doc_length must be [min, max]");
            s.doc_length_min = len[0];
            s.doc_length_max = len[1];
        }
        s.block_length = j.value("block_length", s.block_length);
        s.genre_by_topic = j.value("genre_by_topic", s.genre_by_topic);
        s.seed = j.value("seed", s.seed);
        for (const auto& t : j.at("topics")) {
            Topic topic;
            topic.name = t.at("name").get<std::string>();
            if (t.contains("words")) {
                topic.words = t.at("words").get<std::vector<std::string>>();
                topic.weights = t.contains("weights") ? t.at("weights").get<std::vector<double>>()
                                                      : std::vector<double>(topic.words.size(), 1.0);
            } else {
                auto n = t.at("size").get<std::size_t>();
                topic.words = make_words(topic.name, n, t.value("marked", true));
                topic.weights = zipf_weights(n, t.value("zipf", 1.0), t.value("zipf_offset", 1.0));
            }
            s.topics.push_back(std::move(topic));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed mixture spec: ") + e.what());
    }
    s.validate();
    return s;
}

} // namespace advect::synth
