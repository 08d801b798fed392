#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "advect/corpus.hpp"
#include "advect/corpus_io.hpp"
#include "advect/counts.hpp"
#include "advect/csv.hpp"
#include "advect/error.hpp"
#include "advect/random.hpp"

namespace advect {

struct LdaParams {
    std::size_t k = 500;
    double alpha = 0.1;
    double beta = 0.1;
    std::size_t max_iters = 5000;
    std::uint64_t seed = 1;
    /// Stop once a sweep reassigns fewer than this fraction of tokens.
    double min_reassign_fraction = 0.001;

    void validate() const {
        if (k < 1) throw ConfigError("LDA needs at least one topic");
        if (!(alpha > 0.0) || !(beta > 0.0)) throw ConfigError("LDA priors must be positive");
    }
};

/// Word-topic assignment counts n(w, tau) of a trained model and the two conditionals
/// derived from them.
class LdaModel {
public:
    LdaModel() = default;
    LdaModel(LdaParams params, std::size_t iterations, std::vector<std::string> words,
             std::vector<std::uint32_t> counts)
        : params_(params), iterations_(iterations), words_(std::move(words)), counts_(std::move(counts)) {
        if (counts_.size() != words_.size() * params_.k) throw DomainError("LDA count table has wrong size");
        for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
        topic_totals_.assign(params_.k, 0);
        word_totals_.assign(words_.size(), 0);
        for (std::size_t w = 0; w < words_.size(); ++w)
            for (std::size_t t = 0; t < params_.k; ++t) {
                topic_totals_[t] += count(w, t);
                word_totals_[w] += count(w, t);
            }
    }

    const LdaParams& params() const noexcept { return params_; }
    std::size_t k() const noexcept { return params_.k; }
    std::size_t iterations() const noexcept { return iterations_; }
    const std::vector<std::string>& words() const noexcept { return words_; }
    std::size_t vocab_size() const noexcept { return words_.size(); }

    std::optional<std::size_t> find(const std::string& word) const {
        auto it = index_.find(word);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::uint32_t count(std::size_t w, std::size_t topic) const { return counts_[w * params_.k + topic]; }
    std::uint64_t topic_total(std::size_t topic) const { return topic_totals_[topic]; }
    std::uint64_t word_total(std::size_t w) const { return word_totals_[w]; }

    std::uint64_t token_count() const {
        std::uint64_t n = 0;
        for (auto t : topic_totals_) n += t;
        return n;
    }

    /// p(w | tau); zero for a topic with no tokens.
    double p_word_given_topic(std::size_t w, std::size_t topic) const {
        auto tot = topic_totals_[topic];
        return tot ? static_cast<double>(count(w, topic)) / static_cast<double>(tot) : 0.0;
    }

    /// p(tau | w)
    double p_topic_given_word(std::size_t w, std::size_t topic) const {
        auto tot = word_totals_[w];
        return tot ? static_cast<double>(count(w, topic)) / static_cast<double>(tot) : 0.0;
    }

private:
    LdaParams params_;
    std::size_t iterations_ = 0;
    std::vector<std::string> words_;
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint64_t> topic_totals_;
    std::vector<std::uint64_t> word_totals_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Collapsed Gibbs sampler over token-topic assignments.
class GibbsSampler {
public:
    /// `docs` hold dense word ids in [0, vocab_size).
    GibbsSampler(std::vector<std::vector<std::uint32_t>> docs, std::size_t vocab_size, LdaParams params)
        : params_(params), docs_(std::move(docs)), vocab_size_(vocab_size), rng_(params.seed) {
        params_.validate();
        const std::size_t k = params_.k;
        word_topic_.assign(vocab_size_ * k, 0);
        topic_total_.assign(k, 0);
        doc_topic_.assign(docs_.size() * k, 0);
        z_.resize(docs_.size());
        for (std::size_t d = 0; d < docs_.size(); ++d) {
            z_[d].resize(docs_[d].size());
            for (std::size_t i = 0; i < docs_[d].size(); ++i) {
                auto topic = static_cast<std::uint32_t>(rng_.below(k));
                z_[d][i] = topic;
                add(d, docs_[d][i], topic);
                ++tokens_;
            }
        }
        if (tokens_ == 0) throw DomainError("LDA needs a non-empty corpus");
        weights_.resize(k);
    }

    /// One pass over every token. Returns how many tokens changed topic.
    std::size_t sweep() {
        const std::size_t k = params_.k;
        const double vbeta = static_cast<double>(vocab_size_) * params_.beta;
        std::size_t changed = 0;
        for (std::size_t d = 0; d < docs_.size(); ++d) {
            for (std::size_t i = 0; i < docs_[d].size(); ++i) {
                const auto w = docs_[d][i];
                const auto old = z_[d][i];
                remove(d, w, old);
                double acc = 0.0;
                for (std::size_t t = 0; t < k; ++t) {
                    acc += (doc_topic_[d * k + t] + params_.alpha) * (word_topic_[w * k + t] + params_.beta) /
                           (topic_total_[t] + vbeta);
                    weights_[t] = acc;
                }
                auto topic = static_cast<std::uint32_t>(rng_.pick_cumulative(weights_));
                z_[d][i] = topic;
                add(d, w, topic);
                if (topic != old) ++changed;
            }
        }
        ++iterations_;
        return changed;
    }

    /// Sweeps until the reassignment fraction drops below the threshold or the cap is hit.
    void run() {
        while (iterations_ < params_.max_iters) {
            auto changed = sweep();
            if (static_cast<double>(changed) < params_.min_reassign_fraction * static_cast<double>(tokens_)) break;
        }
    }

    std::size_t iterations() const noexcept { return iterations_; }
    std::size_t tokens() const noexcept { return tokens_; }
    const std::vector<std::uint32_t>& word_topic_counts() const noexcept { return word_topic_; }

    LdaModel model(std::vector<std::string> words) const {
        return LdaModel(params_, iterations_, std::move(words), word_topic_);
    }

private:
    void add(std::size_t d, std::uint32_t w, std::uint32_t t) {
        ++word_topic_[w * params_.k + t];
        ++doc_topic_[d * params_.k + t];
        ++topic_total_[t];
    }
    void remove(std::size_t d, std::uint32_t w, std::uint32_t t) {
        --word_topic_[w * params_.k + t];
        --doc_topic_[d * params_.k + t];
        --topic_total_[t];
    }

    LdaParams params_;
    std::vector<std::vector<std::uint32_t>> docs_;
    std::size_t vocab_size_;
    Rng rng_;
    std::vector<std::uint32_t> word_topic_;
    std::vector<std::uint32_t> doc_topic_;
    std::vector<std::uint64_t> topic_total_;
    std::vector<std::vector<std::uint32_t>> z_;
    std::vector<double> weights_;
    std::size_t tokens_ = 0;
    std::size_t iterations_ = 0;
};

/// Maps a document set onto a dense vocabulary of words with at least `threshold`
/// occurrences (sorted lexicographically), dropping all other tokens.
struct LdaInput {
    std::vector<std::vector<std::uint32_t>> docs;
    std::vector<std::string> words;
};

inline LdaInput prepare_lda_input(const DocumentViews& views, const Vocabulary& vocab, std::uint64_t threshold) {
    std::vector<std::uint64_t> freq(vocab.size(), 0);
    for (auto d : views)
        for (auto id : d) ++freq[id];
    LdaInput in;
    std::vector<WordId> kept;
    for (WordId id = 0; id < vocab.size(); ++id)
        if (freq[id] > 0 && freq[id] >= threshold) kept.push_back(id);
    std::sort(kept.begin(), kept.end(), [&](WordId a, WordId b) { return vocab.word(a) < vocab.word(b); });
    std::vector<std::int64_t> local(vocab.size(), -1);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        local[kept[i]] = static_cast<std::int64_t>(i);
        in.words.push_back(vocab.word(kept[i]));
    }
    for (auto d : views) {
        std::vector<std::uint32_t> doc;
        for (auto id : d)
            if (local[id] >= 0) doc.push_back(static_cast<std::uint32_t>(local[id]));
        if (!doc.empty()) in.docs.push_back(std::move(doc));
    }
    return in;
}

inline LdaModel train_lda(const LdaInput& input, const LdaParams& params) {
    params.validate();
    GibbsSampler sampler(input.docs, input.words.size(), params);
    sampler.run();
    return sampler.model(input.words);
}

inline LdaModel train_lda(const DocumentViews& views, const Vocabulary& vocab, std::uint64_t threshold,
                          const LdaParams& params) {
    return train_lda(prepare_lda_input(views, vocab, threshold), params);
}

struct LdaAdvection {
    double value = 0.0;
    /// Topics skipped because the target holds all of their mass.
    std::size_t singular_topics = 0;
};

/// Topic-weighted advection, with `changes` aligned to model.words():
///   topicChange(tau) = sum_{w' != w} p(w'|tau) change(w') p(tau|w') / (1 - p(w|tau))
///   advection(w)     = sum_tau topicChange(tau) p(tau|w)
/// The full per-topic sums are computed once; each target then subtracts its own term.
class LdaAdvectionCalculator {
public:
    LdaAdvectionCalculator(const LdaModel& model, std::span<const double> changes)
        : model_(model), changes_(changes.begin(), changes.end()), topic_sums_(model.k(), 0.0) {
        if (changes.size() != model.vocab_size()) throw DomainError("change vector does not match LDA vocabulary");
        for (std::size_t v = 0; v < model.vocab_size(); ++v)
            for (std::size_t t = 0; t < model.k(); ++t)
                if (model.count(v, t))
                    topic_sums_[t] += model.p_word_given_topic(v, t) * changes_[v] * model.p_topic_given_word(v, t);
    }

    LdaAdvection operator()(const std::string& target) const {
        auto w = model_.find(target);
        if (!w) throw LookupError("'" + target + "' not in LDA vocabulary");
        LdaAdvection out;
        for (std::size_t t = 0; t < model_.k(); ++t) {
            double p_topic = model_.p_topic_given_word(*w, t);
            if (p_topic <= 0.0) continue;
            double p_self = model_.p_word_given_topic(*w, t);
            if (1.0 - p_self <= 0.0) {
                ++out.singular_topics;
                continue;
            }
            double others = topic_sums_[t] - p_self * changes_[*w] * p_topic;
            out.value += others / (1.0 - p_self) * p_topic;
        }
        return out;
    }

private:
    const LdaModel& model_;
    std::vector<double> changes_;
    std::vector<double> topic_sums_;
};

inline LdaAdvection lda_advection_detail(const LdaModel& model, std::span<const double> changes,
                                         const std::string& target) {
    return LdaAdvectionCalculator(model, changes)(target);
}

inline double lda_advection(const LdaModel& model, std::span<const double> changes, const std::string& target) {
    auto r = lda_advection_detail(model, changes, target);
    if (r.singular_topics)
        std::clog << "warning: '" << target << "' owns " << r.singular_topics
                  << " LDA topic(s); they contribute 0 to its advection\n";
    return r.value;
}

/// Log changes at period t for every model word.
inline std::vector<double> model_changes(const LdaModel& model, const FrequencyTable& table, std::size_t t) {
    std::vector<double> c(model.vocab_size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = table.change(model.words()[i], t);
    return c;
}

// Flat model file:
//   advect-lda 1
//   k=<k> alpha=<a> beta=<b> seed=<s> iters=<n>
//   word<TAB>topic<TAB>count      (one line per non-zero n(w, tau))
inline void save_lda(const LdaModel& model, std::ostream& out) {
    const auto& p = model.params();
    out << "advect-lda 1\n"
        << "k=" << p.k << " alpha=" << csv::number(p.alpha) << " beta=" << csv::number(p.beta) << " seed=" << p.seed
        << " iters=" << model.iterations() << '\n';
    for (std::size_t w = 0; w < model.vocab_size(); ++w)
        for (std::size_t t = 0; t < model.k(); ++t)
            if (auto c = model.count(w, t)) out << model.words()[w] << '\t' << t << '\t' << c << '\n';
}

inline LdaModel load_lda(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    if (!std::getline(in, line) || line != "advect-lda 1") throw ParseError(name + ": not an LDA model file", 1);
    if (!std::getline(in, line)) throw ParseError(name + ": missing header", 2);
    LdaParams params;
    std::size_t iters = 0;
    std::istringstream hs(line);
    std::string kv;
    while (hs >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ParseError(name + ": bad header field '" + kv + "'", 2);
        auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
        try {
            if (key == "k") params.k = std::stoull(val);
            else if (key == "alpha") params.alpha = std::stod(val);
            else if (key == "beta") params.beta = std::stod(val);
            else if (key == "seed") params.seed = std::stoull(val);
            else if (key == "iters") iters = std::stoull(val);
        } catch (const std::logic_error&) {
            throw ParseError(name + ": bad header value '" + kv + "'", 2);
        }
    }
    std::vector<std::string> words;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::tuple<std::size_t, std::size_t, std::uint32_t>> triples;
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = detail::split(line, '\t');
        if (f.size() != 3) throw ParseError(name + ": expected word, topic, count", lineno);
        auto [it, inserted] = index.emplace(f[0], words.size());
        if (inserted) words.push_back(f[0]);
        std::size_t topic = 0;
        unsigned long long c = 0;
        try {
            topic = std::stoull(f[1]);
            c = std::stoull(f[2]);
        } catch (const std::logic_error&) {
            throw ParseError(name + ": bad topic or count", lineno);
        }
        if (topic >= params.k) throw ParseError(name + ": topic index out of range", lineno);
        triples.emplace_back(it->second, topic, static_cast<std::uint32_t>(c));
    }
    std::vector<std::uint32_t> counts(words.size() * params.k, 0);
    for (const auto& [w, t, c] : triples) counts[w * params.k + t] = c;
    return LdaModel(params, iters, std::move(words), std::move(counts));
}

} // namespace advect
