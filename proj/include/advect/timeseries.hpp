#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "advect/advection.hpp"
#include "advect/cooccurrence.hpp"
#include "advect/counts.hpp"
#include "advect/csv.hpp"
#include "advect/error.hpp"
#include "advect/stats.hpp"

namespace advect {

/// Log changes with the topic's share removed: x = c - d.
inline std::vector<double> adjust(std::span<const double> changes, std::span<const double> advections) {
    if (changes.size() != advections.size()) throw DomainError("change and advection series differ in length");
    std::vector<double> x(changes.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = changes[i] - advections[i];
    return x;
}

/// Rebuilds a pmw series from an initial value and successive log changes:
/// y_0 = initial, y_i = exp(ln(initial) + x_1 + ... + x_i). Returns changes.size() + 1 values.
inline std::vector<double> reform(double initial_pmw, std::span<const double> changes) {
    if (!(initial_pmw > 0.0)) throw DomainError("reformed series needs a positive initial frequency");
    std::vector<double> y{initial_pmw};
    double acc = std::log(initial_pmw);
    for (double x : changes) {
        acc += x;
        y.push_back(std::exp(acc));
    }
    return y;
}

/// One word's frequency series decomposed against its advection.
struct AdjustedSeries {
    std::string word;
    std::vector<std::string> periods;
    std::vector<double> pmw;          // a
    std::vector<double> log_freq;     // b; NaN where pmw is 0
    std::vector<double> changes;      // c, one per period pair
    std::vector<double> advections;   // d, 0 where no record exists
    std::vector<bool> has_advection;
    std::vector<double> adjusted;     // x
    std::vector<double> reformed;     // y, one per period
};

/// Pairs the word's log changes with its advection records. Periods without a record
/// are left unadjusted. A zero initial frequency starts the reformed series at the
/// one-occurrence smoothing value.
inline AdjustedSeries adjusted_series(const FrequencyTable& table, const std::string& word,
                                      const std::vector<AdvectionRecord>& records) {
    if (!table.contains(word)) throw LookupError("word '" + word + "' not in frequency table");
    AdjustedSeries s;
    s.word = word;
    s.periods = table.periods();
    s.pmw = table.pmw_series(word);
    for (double f : s.pmw) s.log_freq.push_back(f > 0.0 ? std::log(f) : std::nan(""));
    const std::size_t n = table.num_periods();
    s.advections.assign(n > 0 ? n - 1 : 0, 0.0);
    s.has_advection.assign(s.advections.size(), false);
    for (const auto& r : records) {
        if (r.word != word) continue;
        auto idx = std::find(s.periods.begin(), s.periods.end(), r.period) - s.periods.begin();
        if (idx <= 0 || static_cast<std::size_t>(idx) >= n) continue;
        s.advections[idx - 1] = r.advection;
        s.has_advection[idx - 1] = true;
    }
    for (std::size_t t = 1; t < n; ++t) s.changes.push_back(table.change(word, t));
    s.adjusted = adjust(s.changes, s.advections);
    double initial = s.pmw.empty() ? 0.0 : s.pmw[0];
    if (initial <= 0.0 && n > 1) initial = table.smoothing_pair(1).first.unit;
    if (n > 0) s.reformed = reform(initial, s.adjusted);
    return s;
}

/// `period,pmw,log_freq,log_change,advection,adjusted,reformed` (rows a, b, c, d, x, y).
inline void write_series_csv(const AdjustedSeries& s, std::ostream& out) {
    csv::Writer w(out);
    w.row("period", "pmw", "log_freq", "log_change", "advection", "adjusted", "reformed");
    for (std::size_t i = 0; i < s.periods.size(); ++i) {
        if (i == 0) {
            w.row(s.periods[i], s.pmw[i], s.log_freq[i], "", "", "", s.reformed[i]);
        } else {
            std::optional<double> d;
            if (s.has_advection[i - 1]) d = s.advections[i - 1];
            w.row(s.periods[i], s.pmw[i], s.log_freq[i], s.changes[i - 1], d, s.adjusted[i - 1], s.reformed[i]);
        }
    }
}

/// Per-period regression residuals (observed change minus fitted). Empty when the
/// regression is degenerate.
inline std::optional<std::map<std::string, double>> residuals(std::span<const AdvectionRecord> records) {
    std::vector<double> x, y;
    for (const auto& r : records) {
        x.push_back(r.advection);
        y.push_back(r.log_change);
    }
    auto fit = stats::ols(x, y);
    if (!fit) return std::nullopt;
    std::map<std::string, double> out;
    for (const auto& r : records) out[r.word] = r.log_change - fit->predict(r.advection);
    return out;
}

/// Residuals of every period's own regression: period -> word -> residual.
inline std::map<std::string, std::map<std::string, double>> residuals_by_period(
    const std::vector<AdvectionRecord>& records) {
    std::map<std::string, std::vector<AdvectionRecord>> groups;
    for (const auto& r : records) groups[r.period].push_back(r);
    std::map<std::string, std::map<std::string, double>> out;
    for (const auto& [p, recs] : groups)
        if (auto res = residuals(recs)) out[p] = std::move(*res);
    return out;
}

enum class InnovationClass { below, within, above };

inline std::string class_name(InnovationClass c) {
    switch (c) {
    case InnovationClass::below: return "below";
    case InnovationClass::within: return "within";
    case InnovationClass::above: return "above";
    }
    return {};
}

struct InnovationReport {
    std::string word;
    std::string entry_period;
    TopicVector topic;
    std::vector<std::pair<std::string, double>> history;
    double entry_advection = 0.0;
    double mean = 0.0;
    double sd = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::optional<double> z;
    InnovationClass classification = InnovationClass::within;
    /// History had zero spread; classification compares against the mean itself.
    bool degenerate_sd = false;
};

/// Places an entry value against the 95% t-interval of the history mean.
inline void classify(InnovationReport& r, std::span<const double> history) {
    if (history.size() < 2) throw InsufficientHistoryError("need at least 2 history points for '" + r.word + "'");
    const double n = static_cast<double>(history.size());
    r.mean = stats::mean(history);
    r.sd = stats::stddev(history);
    double half = stats::t_quantile(0.975, n - 1.0) * r.sd / std::sqrt(n);
    r.ci_low = r.mean - half;
    r.ci_high = r.mean + half;
    if (r.sd > 0.0) {
        r.degenerate_sd = false;
        r.z = (r.entry_advection - r.mean) / r.sd;
        r.classification = r.entry_advection > r.ci_high   ? InnovationClass::above
                           : r.entry_advection < r.ci_low ? InnovationClass::below
                                                          : InnovationClass::within;
    } else {
        r.degenerate_sd = true;
        r.z = r.entry_advection == r.mean ? std::optional<double>(0.0) : std::nullopt;
        r.classification = r.entry_advection > r.mean   ? InnovationClass::above
                           : r.entry_advection < r.mean ? InnovationClass::below
                                                        : InnovationClass::within;
    }
}

/// Compares a new word's topic advection at its entry period with the advection of the
/// same (frozen) topic over up to `history_depth` preceding periods. Context words with
/// zero frequency on both sides of a period pair are left out of that pair.
inline InnovationReport innovation_test(const std::string& word, const TopicVector& topic, const FrequencyTable& table,
                                        std::size_t entry, std::size_t history_depth = 10) {
    if (entry == 0 || entry >= table.num_periods())
        throw DomainError("entry period must have a predecessor in the corpus");
    if (topic.empty()) throw DomainError("empty topic for '" + word + "'");
    InnovationReport r;
    r.word = word;
    r.entry_period = table.periods()[entry];
    r.topic = topic;
    auto entry_value = topic_advection(topic, table, entry, true);
    if (!entry_value) throw DomainError("no topic word of '" + word + "' occurs at its entry period");
    r.entry_advection = *entry_value;
    std::vector<double> values;
    std::size_t first = entry > history_depth ? entry - history_depth : 1;
    for (std::size_t s = first; s < entry; ++s) {
        if (auto a = topic_advection(topic, table, s, true)) {
            r.history.emplace_back(table.periods()[s], *a);
            values.push_back(*a);
        }
    }
    classify(r, values);
    return r;
}

/// Same, estimating the topic from `model` and checking that the word first occurs at
/// the entry period.
inline InnovationReport innovation_test(const std::string& word, const TopicModel& model, const FrequencyTable& table,
                                        std::size_t entry, std::size_t history_depth = 10) {
    if (table.raw(word, entry) == 0) throw DomainError("'" + word + "' does not occur at its entry period");
    for (std::size_t p = 0; p < entry; ++p)
        if (table.raw(word, p) != 0)
            throw DomainError("'" + word + "' already occurs in period " + table.periods()[p]);
    return innovation_test(word, model.topic(word), table, entry, history_depth);
}

/// Index of the first period where the word occurs, if any.
inline std::optional<std::size_t> first_occurrence(const FrequencyTable& table, const std::string& word) {
    for (std::size_t p = 0; p < table.num_periods(); ++p)
        if (table.raw(word, p) > 0) return p;
    return std::nullopt;
}

/// Targets with a topic in `model` whose first occurrence falls in [first, last].
inline std::vector<std::pair<std::string, std::size_t>> novel_words(const TopicModel& model, const FrequencyTable& table,
                                                                    std::size_t first, std::size_t last) {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto& w : model.targets()) {
        auto p = first_occurrence(table, w);
        if (p && *p >= first && *p <= last && *p > 0 && !model.topic(w).empty()) out.emplace_back(w, *p);
    }
    return out;
}

/// One-sample t-test that the mean entry z-score exceeds zero. Empty when the z-scores
/// have zero variance.
inline std::optional<stats::TTest> innovation_ttest(const std::vector<InnovationReport>& reports) {
    std::vector<double> z;
    for (const auto& r : reports)
        if (r.z && std::isfinite(*r.z)) z.push_back(*r.z);
    if (z.size() < 2) throw DomainError("t-test needs at least two reports with a finite z-score");
    return stats::one_sample_t_greater(z);
}

inline nlohmann::json to_json(const InnovationReport& r) {
    nlohmann::json j;
    j["word"] = r.word;
    j["entry_period"] = r.entry_period;
    j["topic"] = nlohmann::json::array();
    for (const auto& [w, v] : r.topic.contexts) j["topic"].push_back({w, v});
    j["history"] = nlohmann::json::array();
    for (const auto& [p, v] : r.history) j["history"].push_back({p, v});
    j["entry_advection"] = r.entry_advection;
    j["mean"] = r.mean;
    j["sd"] = r.sd;
    j["ci_low"] = r.ci_low;
    j["ci_high"] = r.ci_high;
    j["z"] = r.z ? nlohmann::json(*r.z) : nlohmann::json(nullptr);
    j["class"] = class_name(r.classification);
    j["degenerate_sd"] = r.degenerate_sd;
    return j;
}

/// Plot data for innovation histories: one row per history point plus the entry point.
inline void write_innovation_csv(const std::vector<InnovationReport>& reports, std::ostream& out) {
    csv::Writer w(out);
    w.row("word", "period", "kind", "advection", "mean", "ci_low", "ci_high", "class");
    for (const auto& r : reports) {
        for (const auto& [p, v] : r.history) w.row(r.word, p, "history", v, r.mean, r.ci_low, r.ci_high, class_name(r.classification));
        w.row(r.word, r.entry_period, "entry", r.entry_advection, r.mean, r.ci_low, r.ci_high,
              class_name(r.classification));
    }
}

} // namespace advect
