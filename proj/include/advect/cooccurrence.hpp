#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "advect/corpus.hpp"
#include "advect/csv.hpp"
#include "advect/error.hpp"

namespace advect {

/// Weighted co-occurrence counts with explicit marginals.
///
/// Marginals are stored rather than derived so that rows can be dropped (e.g. keeping
/// only target-class rows) without changing P(w) and P(c) of the remaining cells.
struct SparseCooccurrence {
    using Row = std::vector<std::pair<WordId, double>>; // sorted by context id

    std::unordered_map<WordId, Row> rows;
    std::unordered_map<WordId, double> row_sums;
    std::unordered_map<WordId, double> col_sums;
    double total = 0.0;

    bool has_row(WordId w) const { return rows.count(w) != 0; }

    double cell(WordId w, WordId c) const {
        auto it = rows.find(w);
        if (it == rows.end()) return 0.0;
        auto pos = std::lower_bound(it->second.begin(), it->second.end(), std::make_pair(c, 0.0),
                                    [](const auto& a, const auto& b) { return a.first < b.first; });
        return pos != it->second.end() && pos->first == c ? pos->second : 0.0;
    }

    /// Builds a matrix from (row, col, value) cells and derives marginals from them.
    static SparseCooccurrence from_cells(const std::vector<std::tuple<WordId, WordId, double>>& cells) {
        std::map<std::pair<WordId, WordId>, double> acc;
        for (const auto& [w, c, v] : cells) {
            if (!(v >= 0.0)) throw DomainError("co-occurrence cells must be non-negative");
            acc[{w, c}] += v;
        }
        SparseCooccurrence m;
        for (const auto& [key, v] : acc) {
            if (v == 0.0) continue;
            m.rows[key.first].emplace_back(key.second, v);
            m.row_sums[key.first] += v;
            m.col_sums[key.second] += v;
            m.total += v;
        }
        return m;
    }
};

struct CooccurrenceParams {
    std::size_t window = 10;
    std::uint64_t threshold = 100;
    unsigned threads = 1;
};

namespace detail {

inline std::uint64_t pair_key(WordId a, WordId b) { return (std::uint64_t{a} << 32) | b; }

using PairCounts = std::unordered_map<std::uint64_t, std::uint64_t>;

// Weight numerators (window - d + 1) are summed as integers so that the result does not
// depend on document order or thread count.
inline void count_pairs(std::span<const std::span<const WordId>> docs, std::size_t window,
                        const std::vector<char>& eligible, PairCounts& out) {
    for (auto doc : docs) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            WordId a = doc[i];
            if (!eligible[a]) continue;
            std::size_t end = std::min(doc.size(), i + window + 1);
            for (std::size_t j = i + 1; j < end; ++j) {
                WordId b = doc[j];
                if (!eligible[b] || a == b) continue;
                std::uint64_t num = window - (j - i) + 1;
                out[pair_key(a, b)] += num;
                out[pair_key(b, a)] += num;
            }
        }
    }
}

} // namespace detail

/// Raw occurrence count of each word id over a document set.
inline std::vector<std::uint64_t> occurrence_counts(const DocumentViews& docs, std::size_t vocab_size) {
    std::vector<std::uint64_t> n(vocab_size, 0);
    for (auto d : docs)
        for (auto id : d) ++n.at(id);
    return n;
}

/// Symmetric co-occurrence within +-window tokens of the same document, linearly
/// weighted as (window - d + 1) / window. Only words with at least `threshold`
/// occurrences in `docs` take part, as rows and as contexts; the token positions of
/// other words still count toward distances. `keep_row` then selects which rows are
/// retained (marginals stay those of the full matrix).
inline SparseCooccurrence build_cooccurrence(const DocumentViews& docs, std::size_t vocab_size,
                                             const CooccurrenceParams& params,
                                             const std::function<bool(WordId)>& keep_row = {}) {
    if (params.window < 1) throw ConfigError("co-occurrence window must be at least 1");
    auto freq = occurrence_counts(docs, vocab_size);
    std::vector<char> eligible(vocab_size, 0);
    for (std::size_t i = 0; i < vocab_size; ++i) eligible[i] = freq[i] >= params.threshold && freq[i] > 0;

    unsigned threads = std::max(1u, std::min<unsigned>(params.threads, static_cast<unsigned>(docs.size())));
    std::vector<detail::PairCounts> partial(threads);
    {
        std::vector<std::jthread> pool;
        std::size_t chunk = (docs.size() + threads - 1) / std::max(1u, threads);
        for (unsigned t = 0; t < threads; ++t) {
            std::size_t b = std::min(docs.size(), t * chunk), e = std::min(docs.size(), b + chunk);
            std::span<const std::span<const WordId>> part(docs.data() + b, e - b);
            if (threads == 1)
                detail::count_pairs(part, params.window, eligible, partial[t]);
            else
                pool.emplace_back([&, part, t] { detail::count_pairs(part, params.window, eligible, partial[t]); });
        }
    }
    for (unsigned t = 1; t < threads; ++t) {
        for (const auto& [k, v] : partial[t]) partial[0][k] += v;
        partial[t].clear();
    }
    const auto& counts = partial[0];

    std::unordered_map<WordId, std::uint64_t> sums;
    std::uint64_t grand = 0;
    for (const auto& [k, v] : counts) {
        sums[static_cast<WordId>(k >> 32)] += v;
        grand += v;
    }
    const double scale = static_cast<double>(params.window);
    SparseCooccurrence m;
    m.total = static_cast<double>(grand) / scale;
    for (const auto& [w, s] : sums) {
        m.row_sums[w] = static_cast<double>(s) / scale;
        m.col_sums[w] = static_cast<double>(s) / scale;
    }
    for (const auto& [k, v] : counts) {
        auto w = static_cast<WordId>(k >> 32);
        if (keep_row && !keep_row(w)) continue;
        m.rows[w].emplace_back(static_cast<WordId>(k & 0xffffffffu), static_cast<double>(v) / scale);
    }
    for (auto& [w, row] : m.rows) std::sort(row.begin(), row.end());
    return m;
}

/// max(log2(P(w,c) / (P(w) P(c))), 0) per cell; non-positive cells are dropped.
inline SparseCooccurrence ppmi(const SparseCooccurrence& counts) {
    if (!(counts.total > 0.0)) throw DomainError("PPMI needs a non-empty co-occurrence matrix");
    SparseCooccurrence out;
    out.total = counts.total;
    out.row_sums = counts.row_sums;
    out.col_sums = counts.col_sums;
    for (const auto& [w, row] : counts.rows) {
        double rw = counts.row_sums.at(w);
        SparseCooccurrence::Row weighted;
        for (const auto& [c, v] : row) {
            if (v <= 0.0) continue;
            double pmi = std::log2(v * counts.total / (rw * counts.col_sums.at(c)));
            if (pmi > 0.0) weighted.emplace_back(c, pmi);
        }
        out.rows.emplace(w, std::move(weighted));
    }
    return out;
}

/// A word's top-m PPMI contexts in one period, strongest first.
struct TopicVector {
    std::string target;
    std::string period;
    std::vector<std::pair<std::string, double>> contexts;
    std::size_t m = 75;

    bool empty() const noexcept { return contexts.empty(); }
    std::size_t size() const noexcept { return contexts.size(); }
};

/// Top-m positive-weight contexts of `target`; ties go to the lexicographically smaller word.
inline TopicVector topic_vector(const SparseCooccurrence& weights, const Vocabulary& vocab, const std::string& target,
                                std::size_t m = 75, const std::string& period = {}) {
    auto id = vocab.find(target);
    if (!id || !weights.has_row(*id)) throw BelowThresholdError(target, period);
    TopicVector tv{target, period, {}, m};
    for (const auto& [c, v] : weights.rows.at(*id))
        if (v > 0.0 && c != *id) tv.contexts.emplace_back(vocab.word(c), v);
    auto order = [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; };
    if (tv.contexts.size() > m) {
        std::partial_sort(tv.contexts.begin(), tv.contexts.begin() + static_cast<std::ptrdiff_t>(m), tv.contexts.end(),
                          order);
        tv.contexts.resize(m);
    } else {
        std::sort(tv.contexts.begin(), tv.contexts.end(), order);
    }
    return tv;
}

/// Rank-based similarity: sum over shared contexts of 1 / mean(rank_a, rank_b).
inline double apsyn(const TopicVector& a, const TopicVector& b) {
    if (a.empty() || b.empty()) throw DomainError("APSyn needs non-empty topic vectors");
    std::unordered_map<std::string, std::size_t> rank_b;
    for (std::size_t i = 0; i < b.contexts.size(); ++i) rank_b.emplace(b.contexts[i].first, i + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < a.contexts.size(); ++i) {
        auto it = rank_b.find(a.contexts[i].first);
        if (it != rank_b.end()) s += 2.0 / static_cast<double>(i + 1 + it->second);
    }
    return s;
}

/// PPMI matrix of one topic dataset together with the vocabulary that names its ids.
struct TopicModel {
    SparseCooccurrence weights;
    const Vocabulary* vocab = nullptr;
    std::string period;
    std::size_t m = 75;

    bool has_topic(const std::string& word) const {
        auto id = vocab->find(word);
        return id && weights.has_row(*id);
    }

    TopicVector topic(const std::string& word) const { return topic_vector(weights, *vocab, word, m, period); }

    /// Words that received a row, sorted.
    std::vector<std::string> targets() const {
        std::vector<std::string> out;
        out.reserve(weights.rows.size());
        for (const auto& [w, row] : weights.rows) out.push_back(vocab->word(w));
        std::sort(out.begin(), out.end());
        return out;
    }
};

struct TopicParams {
    CooccurrenceParams cooc;
    std::size_t m = 75;
    bool targets_only = true;
};

/// PPMI topics estimated from the pooled periods ending at t.
inline TopicModel estimate_topics(const PeriodCorpus& corpus, std::size_t t, const Smoothing& smoothing,
                                  const TopicParams& params) {
    auto docs = topic_dataset(corpus, t, smoothing);
    std::function<bool(WordId)> keep;
    if (params.targets_only) keep = [&](WordId w) { return is_target_token(corpus.vocab.word(w)); };
    auto counts = build_cooccurrence(docs, corpus.vocab.size(), params.cooc, keep);
    TopicModel model;
    model.weights = counts.total > 0.0 ? ppmi(counts) : SparseCooccurrence{};
    model.vocab = &corpus.vocab;
    model.period = corpus.periods[t];
    model.m = params.m;
    return model;
}

/// `target,period,rank,context,ppmi`
inline void write_topics_csv(const std::vector<TopicVector>& topics, std::ostream& out, bool header = true) {
    csv::Writer w(out);
    if (header) w.row("target", "period", "rank", "context", "ppmi");
    for (const auto& tv : topics)
        for (std::size_t i = 0; i < tv.contexts.size(); ++i)
            w.row(tv.target, tv.period, i + 1, tv.contexts[i].first, tv.contexts[i].second);
}

} // namespace advect
