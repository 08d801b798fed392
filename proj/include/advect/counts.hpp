#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "advect/corpus.hpp"
#include "advect/csv.hpp"
#include "advect/error.hpp"

namespace advect {

inline constexpr double kPerMillion = 1e6;

/// pmw value of one occurrence in a period; this is the smoothing constant s that
/// stands in for a zero frequency inside a log change.
struct SmoothingRule {
    double unit = 1.0;

    static SmoothingRule for_total(std::uint64_t total) {
        if (total == 0) throw DomainError("smoothing unit undefined for an empty period");
        return {kPerMillion / static_cast<double>(total)};
    }
};

/// ln(curr + s_curr) - ln(prev + s_prev); each s is zero unless its own frequency is
/// zero, and the result is exactly 0 when both frequencies are zero.
inline double log_change(double prev, double curr, SmoothingRule prev_rule, SmoothingRule curr_rule) {
    if (!(prev >= 0.0) || !(curr >= 0.0) || !std::isfinite(prev) || !std::isfinite(curr))
        throw DomainError("log change needs finite non-negative frequencies");
    if (prev == 0.0 && curr == 0.0) return 0.0;
    if (!(prev_rule.unit > 0.0) || !(curr_rule.unit > 0.0)) throw DomainError("smoothing unit must be positive");
    double a = prev > 0.0 ? prev : prev_rule.unit;
    double b = curr > 0.0 ? curr : curr_rule.unit;
    return std::log(b) - std::log(a);
}

inline double log_change(double prev, double curr, SmoothingRule rule = {}) {
    return log_change(prev, curr, rule, rule);
}

struct ChangeMeasures {
    double absolute = 0.0;
    std::optional<double> percent;
    std::optional<double> ln;
    std::optional<double> log10;
};

/// Absolute, percent, natural-log and log10 change from v1 to v2. Undefined measures
/// (percent from zero, logs involving zero) are left empty.
inline ChangeMeasures change_measures(double v1, double v2) {
    if (!(v1 >= 0.0) || !(v2 >= 0.0)) throw DomainError("change measures need non-negative values");
    ChangeMeasures m;
    m.absolute = v2 - v1;
    if (v1 > 0.0) m.percent = (v2 - v1) / v1 * 100.0;
    if (v1 > 0.0 && v2 > 0.0) {
        m.ln = std::log(v2) - std::log(v1);
        m.log10 = std::log10(v2) - std::log10(v1);
    }
    return m;
}

/// Which tokens a frequency table lists. Totals always come from the full retained stream.
enum class TokenClass { all, target };

inline TokenClass parse_token_class(std::string_view s) {
    if (s == "all") return TokenClass::all;
    if (s == "noun" || s == "target") return TokenClass::target;
    throw ConfigError("unknown token class '" + std::string(s) + "'");
}

/// Raw and per-million counts of each word in each period.
class FrequencyTable {
public:
    FrequencyTable() = default;

    FrequencyTable(std::vector<std::string> periods, std::vector<std::uint64_t> totals)
        : periods_(std::move(periods)), totals_(std::move(totals)) {
        if (periods_.size() != totals_.size()) throw DomainError("period/total length mismatch");
    }

    /// Adds (or replaces) a word's raw count series.
    void set_counts(const std::string& word, std::vector<std::uint64_t> counts) {
        if (counts.size() != periods_.size()) throw DomainError("count series length mismatch for '" + word + "'");
        auto [it, inserted] = index_.emplace(word, rows_.size());
        if (inserted) {
            words_.push_back(word);
            rows_.push_back(std::move(counts));
        } else {
            rows_[it->second] = std::move(counts);
        }
    }

    std::size_t num_periods() const noexcept { return periods_.size(); }
    const std::vector<std::string>& periods() const noexcept { return periods_; }
    std::uint64_t total(std::size_t t) const { return totals_.at(t); }
    bool contains(const std::string& word) const { return index_.count(word) != 0; }

    /// Words in lexicographic order.
    std::vector<std::string> words() const {
        auto w = words_;
        std::sort(w.begin(), w.end());
        return w;
    }

    std::uint64_t raw(const std::string& word, std::size_t t) const {
        auto it = index_.find(word);
        return it == index_.end() ? 0 : rows_[it->second].at(t);
    }

    double pmw(const std::string& word, std::size_t t) const {
        auto n = raw(word, t);
        return totals_.at(t) ? static_cast<double>(n) * kPerMillion / static_cast<double>(totals_[t]) : 0.0;
    }

    const std::vector<std::uint64_t>& counts(const std::string& word) const { return rows_.at(row(word)); }

    std::vector<double> pmw_series(const std::string& word) const {
        std::vector<double> s(periods_.size());
        for (std::size_t t = 0; t < s.size(); ++t) s[t] = pmw(word, t);
        return s;
    }

    /// Smoothing units for the pair (t-1, t). An empty period borrows its partner's unit.
    std::pair<SmoothingRule, SmoothingRule> smoothing_pair(std::size_t t) const {
        if (t == 0 || t >= periods_.size()) throw DomainError("no predecessor for period index " + std::to_string(t));
        auto unit = [&](std::size_t p) {
            return totals_[p] ? kPerMillion / static_cast<double>(totals_[p]) : std::nan("");
        };
        double a = unit(t - 1), b = unit(t);
        if (std::isnan(a)) a = b;
        if (std::isnan(b)) b = a;
        if (std::isnan(a)) a = b = 1.0; // both empty: every frequency is zero, units unused
        return {{a}, {b}};
    }

    /// Log change of a word from period t-1 to t. Unknown words count as zero.
    double change(const std::string& word, std::size_t t) const {
        auto [s_prev, s_curr] = smoothing_pair(t);
        return log_change(pmw(word, t - 1), pmw(word, t), s_prev, s_curr);
    }

private:
    std::size_t row(const std::string& word) const {
        auto it = index_.find(word);
        if (it == index_.end()) throw LookupError("word '" + word + "' not in frequency table");
        return it->second;
    }

    std::vector<std::string> periods_;
    std::vector<std::uint64_t> totals_;
    std::vector<std::string> words_;
    std::vector<std::vector<std::uint64_t>> rows_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline FrequencyTable count_frequencies(const PeriodCorpus& corpus, TokenClass cls = TokenClass::all) {
    std::vector<std::vector<std::uint64_t>> counts(corpus.vocab.size(),
                                                   std::vector<std::uint64_t>(corpus.num_periods(), 0));
    for (std::size_t p = 0; p < corpus.num_periods(); ++p)
        for (const auto& d : corpus.documents[p])
            for (auto id : d.tokens) ++counts[id][p];
    FrequencyTable table(corpus.periods, corpus.token_totals);
    for (WordId id = 0; id < corpus.vocab.size(); ++id) {
        const auto& w = corpus.vocab.word(id);
        if (cls == TokenClass::target && !is_target_token(w)) continue;
        table.set_counts(w, std::move(counts[id]));
    }
    return table;
}

/// Log changes between successive entries of a pmw series, each side smoothed with its
/// own period's unit.
inline std::vector<double> change_series(std::span<const double> pmw, std::span<const double> units) {
    if (pmw.size() != units.size()) throw DomainError("pmw/unit length mismatch");
    std::vector<double> out;
    for (std::size_t t = 1; t < pmw.size(); ++t)
        out.push_back(log_change(pmw[t - 1], pmw[t], {units[t - 1]}, {units[t]}));
    return out;
}

inline std::vector<std::pair<std::string, double>> change_series(const FrequencyTable& table,
                                                                 const std::string& word) {
    if (!table.contains(word)) throw LookupError("word '" + word + "' not in frequency table");
    std::vector<std::pair<std::string, double>> out;
    for (std::size_t t = 1; t < table.num_periods(); ++t) out.emplace_back(table.periods()[t], table.change(word, t));
    return out;
}

/// `word,period,raw,pmw`, words sorted, periods in corpus order.
inline void write_frequency_csv(const FrequencyTable& table, std::ostream& out) {
    csv::Writer w(out);
    w.row("word", "period", "raw", "pmw");
    for (const auto& word : table.words())
        for (std::size_t t = 0; t < table.num_periods(); ++t)
            w.row(word, table.periods()[t], table.raw(word, t), table.pmw(word, t));
}

} // namespace advect
