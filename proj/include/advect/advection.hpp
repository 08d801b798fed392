#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "advect/cooccurrence.hpp"
#include "advect/corpus.hpp"
#include "advect/counts.hpp"
#include "advect/csv.hpp"
#include "advect/error.hpp"
#include "advect/lda.hpp"
#include "advect/stats.hpp"

namespace advect {

inline double weighted_mean(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size()) throw DomainError("values and weights differ in length");
    if (values.empty()) throw DomainError("weighted mean of an empty sequence");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(weights[i] >= 0.0)) throw DomainError("weights must be non-negative");
        num += values[i] * weights[i];
        den += weights[i];
    }
    if (!(den > 0.0)) throw DomainError("weights sum to zero");
    return num / den;
}

/// Advection from precomputed context changes; contexts missing from `changes` did not
/// occur in either period and count as 0.
inline double ppmi_advection(const TopicVector& topic, const std::unordered_map<std::string, double>& changes) {
    if (topic.empty()) throw DomainError("advection of an empty topic ('" + topic.target + "')");
    std::vector<double> x, w;
    x.reserve(topic.size());
    w.reserve(topic.size());
    for (const auto& [word, weight] : topic.contexts) {
        auto it = changes.find(word);
        x.push_back(it == changes.end() ? 0.0 : it->second);
        w.push_back(weight);
    }
    return weighted_mean(x, w);
}

/// PPMI-weighted mean log change of the topic's context words from period t-1 to t.
/// With `occurring_only`, contexts absent from both periods are left out; the result is
/// empty when no context remains.
inline std::optional<double> topic_advection(const TopicVector& topic, const FrequencyTable& table, std::size_t t,
                                             bool occurring_only = false) {
    if (topic.empty()) throw DomainError("advection of an empty topic ('" + topic.target + "')");
    std::vector<double> x, w;
    for (const auto& [word, weight] : topic.contexts) {
        if (occurring_only && table.raw(word, t - 1) == 0 && table.raw(word, t) == 0) continue;
        x.push_back(table.change(word, t));
        w.push_back(weight);
    }
    if (x.empty()) return std::nullopt;
    return weighted_mean(x, w);
}

inline double ppmi_advection(const TopicVector& topic, const FrequencyTable& table, std::size_t t) {
    return *topic_advection(topic, table, t, false);
}

enum class Variant { ppmi, lda };

inline Variant parse_variant(std::string_view s) {
    if (s == "ppmi") return Variant::ppmi;
    if (s == "lda") return Variant::lda;
    throw ConfigError("unknown advection variant '" + std::string(s) + "'");
}

inline std::string variant_name(Variant v) { return v == Variant::ppmi ? "ppmi" : "lda"; }

struct AdvectionRecord {
    std::string word;
    std::string period;
    std::size_t period_index = 0;
    double log_change = 0.0;
    double advection = 0.0;
    Variant variant = Variant::ppmi;
    Smoothing smoothing;
};

struct AdvectionParams {
    Variant variant = Variant::ppmi;
    Smoothing smoothing = Smoothing::none();
    TopicParams topics;
    LdaParams lda;
    /// Restrict records to these words (all eligible targets when empty).
    std::set<std::string> words;
};

namespace detail {

inline bool wanted(const AdvectionParams& p, const std::string& w) {
    if (!p.words.empty()) return p.words.count(w) != 0;
    return !p.topics.targets_only || is_target_token(w);
}

// A word needs the threshold in both periods of a pair; with smoothing the pooled
// topic dataset already spans the pair, so having a topic row is enough.
inline bool meets_pair_threshold(const FrequencyTable& table, const std::string& w, std::size_t t,
                                 const AdvectionParams& p) {
    if (p.smoothing.width >= 2) return true;
    return table.raw(w, t - 1) >= p.topics.cooc.threshold && table.raw(w, t) >= p.topics.cooc.threshold;
}

} // namespace detail

/// Records for period t (t >= 1) from an estimated PPMI topic model.
inline std::vector<AdvectionRecord> ppmi_records(const TopicModel& model, const FrequencyTable& table, std::size_t t,
                                                 const AdvectionParams& params) {
    std::vector<AdvectionRecord> out;
    for (const auto& w : model.targets()) {
        if (!detail::wanted(params, w) || !detail::meets_pair_threshold(table, w, t, params)) continue;
        auto topic = model.topic(w);
        if (topic.empty()) continue;
        out.push_back({w, table.periods()[t], t, table.change(w, t), ppmi_advection(topic, table, t), Variant::ppmi,
                       params.smoothing});
    }
    return out;
}

/// Records for period t from an LDA model trained on that period's topic dataset.
inline std::vector<AdvectionRecord> lda_records(const LdaModel& model, const FrequencyTable& table, std::size_t t,
                                                const AdvectionParams& params) {
    LdaAdvectionCalculator calc(model, model_changes(model, table, t));
    std::vector<AdvectionRecord> out;
    for (const auto& w : model.words()) {
        if (!detail::wanted(params, w) || !detail::meets_pair_threshold(table, w, t, params)) continue;
        auto adv = calc(w);
        if (adv.singular_topics)
            std::clog << "warning: '" << w << "' owns " << adv.singular_topics << " LDA topic(s) in period "
                      << table.periods()[t] << "; they contribute 0\n";
        out.push_back({w, table.periods()[t], t, table.change(w, t), adv.value, Variant::lda, params.smoothing});
    }
    return out;
}

inline LdaModel train_period_lda(const PeriodCorpus& corpus, std::size_t t, const AdvectionParams& params) {
    return train_lda(topic_dataset(corpus, t, params.smoothing), corpus.vocab, params.topics.cooc.threshold, params.lda);
}

/// Advection of every eligible target in every period after the first. Topics are
/// re-estimated for each period. Records are ordered by period, then word.
inline std::vector<AdvectionRecord> advection_series(const PeriodCorpus& corpus, const FrequencyTable& table,
                                                     const AdvectionParams& params) {
    if (corpus.num_periods() < 2) throw DomainError("advection needs at least two periods");
    std::vector<AdvectionRecord> out;
    for (std::size_t t = 1; t < corpus.num_periods(); ++t) {
        std::vector<AdvectionRecord> part;
        if (params.variant == Variant::ppmi) {
            auto model = estimate_topics(corpus, t, params.smoothing, params.topics);
            part = ppmi_records(model, table, t, params);
        } else {
            auto docs = topic_dataset(corpus, t, params.smoothing);
            auto input = prepare_lda_input(docs, corpus.vocab, params.topics.cooc.threshold);
            if (input.docs.empty()) continue;
            part = lda_records(train_lda(input, params.lda), table, t, params);
        }
        std::move(part.begin(), part.end(), std::back_inserter(out));
    }
    return out;
}

/// Same as above with LDA models supplied per period (index t holds the model for the
/// topic dataset ending at t; entry 0 is unused).
inline std::vector<AdvectionRecord> advection_series(const FrequencyTable& table,
                                                     const std::vector<std::optional<LdaModel>>& models,
                                                     AdvectionParams params) {
    params.variant = Variant::lda;
    std::vector<AdvectionRecord> out;
    for (std::size_t t = 1; t < table.num_periods() && t < models.size(); ++t) {
        if (!models[t]) throw MissingArtifactError("no LDA model for period " + table.periods()[t]);
        auto part = lda_records(*models[t], table, t, params);
        std::move(part.begin(), part.end(), std::back_inserter(out));
    }
    return out;
}

/// R^2 and slope p-value of log change regressed on advection. Empty values mark an
/// undefined fit (fewer than 3 records or zero variance).
struct FitSummary {
    std::string group;
    std::optional<double> r2;
    std::optional<double> p;
    std::size_t n = 0;
};

enum class Grouping { per_period, pooled };

inline FitSummary fit_records(const std::string& group, std::span<const AdvectionRecord* const> recs) {
    std::vector<double> x, y;
    for (const auto* r : recs) {
        x.push_back(r->advection);
        y.push_back(r->log_change);
    }
    FitSummary s{group, std::nullopt, std::nullopt, recs.size()};
    if (auto f = stats::ols(x, y)) {
        s.r2 = f->r2;
        s.p = f->p_value;
    }
    return s;
}

/// Groups follow the period order in which records appear.
inline std::vector<FitSummary> eval_r2(const std::vector<AdvectionRecord>& records, Grouping grouping) {
    std::vector<FitSummary> out;
    if (grouping == Grouping::pooled) {
        std::vector<const AdvectionRecord*> all;
        for (const auto& r : records) all.push_back(&r);
        out.push_back(fit_records("all", all));
        return out;
    }
    std::vector<std::string> order;
    std::map<std::string, std::vector<const AdvectionRecord*>> groups;
    for (const auto& r : records) {
        auto [it, inserted] = groups.try_emplace(r.period);
        if (inserted) order.push_back(r.period);
        it->second.push_back(&r);
    }
    for (const auto& g : order) out.push_back(fit_records(g, groups[g]));
    return out;
}

/// Token counts per genre in one period.
struct GenreDistribution {
    std::string period;
    std::map<std::string, double> counts;

    /// Counts with zeros raised to 1.
    std::map<std::string, double> adjusted() const {
        auto c = counts;
        for (auto& [g, n] : c)
            if (n <= 0.0) n = 1.0;
        return c;
    }

    std::map<std::string, double> probabilities() const {
        auto c = adjusted();
        double total = 0.0;
        for (const auto& [g, n] : c) total += n;
        for (auto& [g, n] : c) n /= total;
        return c;
    }
};

/// One distribution per period over the union of the corpus's genres.
inline std::vector<GenreDistribution> genre_distributions(const PeriodCorpus& corpus) {
    auto genres = corpus.genres();
    std::vector<GenreDistribution> out;
    for (std::size_t p = 0; p < corpus.num_periods(); ++p) {
        GenreDistribution d{corpus.periods[p], {}};
        for (const auto& g : genres) {
            auto it = corpus.genre_totals[p].find(g);
            d.counts[g] = it == corpus.genre_totals[p].end() ? 0.0 : static_cast<double>(it->second);
        }
        out.push_back(std::move(d));
    }
    return out;
}

/// KL(p || q) with natural logarithms, after raising zero counts to 1.
inline double genre_divergence(const GenreDistribution& p, const GenreDistribution& q) {
    if (p.counts.empty()) throw DomainError("empty genre distribution");
    auto pp = p.probabilities(), qq = q.probabilities();
    if (pp.size() != qq.size() || !std::equal(pp.begin(), pp.end(), qq.begin(),
                                              [](const auto& a, const auto& b) { return a.first == b.first; }))
        throw DomainError("genre distributions have different genre sets");
    double kl = 0.0;
    for (const auto& [g, pi] : pp) kl += pi * std::log(pi / qq.at(g));
    return kl;
}

/// `word,period,log_change,advection`
inline void write_advection_csv(const std::vector<AdvectionRecord>& records, std::ostream& out) {
    csv::Writer w(out);
    w.row("word", "period", "log_change", "advection");
    for (const auto& r : records) w.row(r.word, r.period, r.log_change, r.advection);
}

/// Reads records back; period indices follow first appearance unless `periods` is given.
inline std::vector<AdvectionRecord> read_advection_csv(std::istream& in, const std::vector<std::string>& periods = {}) {
    auto rows = csv::read_table(in, {"word", "period", "log_change", "advection"});
    std::vector<std::string> order = periods;
    std::vector<AdvectionRecord> out;
    std::size_t line = 1;
    for (const auto& r : rows) {
        ++line;
        auto it = std::find(order.begin(), order.end(), r[1]);
        if (it == order.end()) {
            if (!periods.empty()) throw ParseError("unknown period '" + r[1] + "'", line);
            order.push_back(r[1]);
            it = order.end() - 1;
        }
        AdvectionRecord rec;
        rec.word = r[0];
        rec.period = r[1];
        rec.period_index = static_cast<std::size_t>(it - order.begin());
        rec.log_change = csv::parse_number(r[2], line);
        rec.advection = csv::parse_number(r[3], line);
        out.push_back(std::move(rec));
    }
    return out;
}

/// `period,r2,p,n`
inline void write_fit_csv(const std::vector<FitSummary>& fits, std::ostream& out) {
    csv::Writer w(out);
    w.row("period", "r2", "p", "n");
    for (const auto& f : fits) w.row(f.group, f.r2, f.p, f.n);
}

/// Scatter data for plotting change against advection: one row per record.
inline void write_scatter_csv(const std::vector<AdvectionRecord>& records, std::ostream& out) {
    csv::Writer w(out);
    w.row("period", "word", "advection", "log_change", "variant", "smoothing");
    for (const auto& r : records)
        w.row(r.period, r.word, r.advection, r.log_change, variant_name(r.variant), r.smoothing.name());
}

} // namespace advect
