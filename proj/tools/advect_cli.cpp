#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "advect/advect.hpp"

namespace fs = std::filesystem;
using namespace advect;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Options {
    std::string cache;
    std::string config;
    unsigned threads = 1;

    std::string manifest;
    std::string format;
    std::string stopwords;
    std::string ocr;
    std::string content_pos = "nn,vv,jj";
    std::string target_pos = "nn";
    std::size_t min_length = 3;
    bool keep_capitalized = false;
    bool use_lemma = false;

    std::string token_class = "all";
    std::string out;
    std::string in;
    std::string period;
    std::string smooth = "none";
    std::size_t window = 10;
    std::size_t m = 75;
    std::uint64_t threshold = 100;
    bool all_words = false;

    std::size_t k = 500;
    double alpha = 0.1;
    double beta = 0.1;
    std::size_t iters = 5000;
    std::optional<std::uint64_t> seed;

    std::string variant = "ppmi";
    std::string scatter;
    std::string by = "period";
    std::string residuals;
    std::string word;
    std::size_t entry_window = 4;
    std::size_t history = 10;
    std::string plot;
    std::string words;

    std::string spec;
    std::string synonym;
    std::string shape = "linear";
    double steepness = 1.0;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct Cli {
    std::unique_ptr<CLI::App> app;
    Options o;
};

void add_topic_options(CLI::App* c, Options& o) {
    c->add_option("--smooth", o.smooth, "none | adjacent | window:N");
    c->add_option("--window", o.window, "co-occurrence window");
    c->add_option("--m", o.m, "topic size");
    c->add_option("--threshold", o.threshold, "minimum raw occurrences");
}

void add_lda_options(CLI::App* c, Options& o) {
    c->add_option("--k", o.k, "number of LDA topics");
    c->add_option("--alpha", o.alpha, "document-topic prior");
    c->add_option("--beta", o.beta, "topic-word prior");
    c->add_option("--iters", o.iters, "maximum Gibbs sweeps");
    c->add_option("--seed", o.seed, "random seed");
}

std::unique_ptr<Cli> make_cli() {
    auto cli = std::make_unique<Cli>();
    auto& o = cli->o;
    cli->app = std::make_unique<CLI::App>("Topical advection of word frequencies in diachronic corpora", "advect");
    auto& app = *cli->app;
    app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    app.add_option("--cache", o.cache, "cache directory (default: $ADVECT_CACHE_DIR or ./advect-cache)");
    app.add_option("--config", o.config, "JSON file of option values; they take precedence over flags");
    app.add_option("--threads", o.threads, "worker threads for co-occurrence counting");

    auto* ingest = app.add_subcommand("ingest", "parse, clean and cache a corpus");
    ingest->add_option("--manifest", o.manifest, "corpus manifest (JSON)");
    ingest->add_option("--format", o.format, "vertical | plain (overrides the manifest)");
    ingest->add_option("--stopwords", o.stopwords, "newline-delimited stopword list");
    ingest->add_option("--ocr", o.ocr, "newline-delimited list of OCR error forms");
    ingest->add_option("--content-pos", o.content_pos, "comma-separated content tag prefixes");
    ingest->add_option("--target-pos", o.target_pos, "comma-separated target tag prefixes");
    ingest->add_option("--min-length", o.min_length, "minimum word length");
    ingest->add_flag("--keep-capitalized", o.keep_capitalized, "keep capitalized words");
    ingest->add_flag("--use-lemma", o.use_lemma, "count lemmas instead of surface forms");

    auto* freq = app.add_subcommand("freq", "word frequencies per period");
    freq->add_option("--class", o.token_class, "all | noun");
    freq->add_option("--out", o.out, "output CSV");

    auto* topics = app.add_subcommand("topics", "PPMI topic vectors");
    topics->add_option("--period", o.period, "period id (default: every period)");
    add_topic_options(topics, o);
    topics->add_flag("--all-words", o.all_words, "estimate topics for every word, not only targets");
    topics->add_option("--out", o.out, "output CSV");

    auto* lda = app.add_subcommand("lda-train", "train one LDA model per period");
    lda->add_option("--period", o.period, "period id (default: every period after the first)");
    lda->add_option("--smooth", o.smooth, "none | adjacent | window:N");
    lda->add_option("--threshold", o.threshold, "minimum raw occurrences");
    add_lda_options(lda, o);

    auto* adv = app.add_subcommand("advect", "advection of every eligible target");
    adv->add_option("--variant", o.variant, "ppmi | lda");
    add_topic_options(adv, o);
    adv->add_option("--words", o.words, "comma-separated words to restrict to");
    adv->add_option("--out", o.out, "output CSV");
    adv->add_option("--scatter", o.scatter, "scatter plot data CSV");

    auto* eval = app.add_subcommand("eval", "R^2 of log change on advection");
    eval->add_option("--by", o.by, "period | pooled");
    eval->add_option("--in", o.in, "advection CSV");
    eval->add_option("--out", o.out, "output CSV");
    eval->add_option("--residuals", o.residuals, "residuals CSV");

    auto* adjust = app.add_subcommand("adjust", "advection-adjusted frequency series of one word");
    adjust->add_option("--word", o.word, "word");
    adjust->add_option("--in", o.in, "advection CSV");
    adjust->add_option("--out", o.out, "output CSV");

    auto* innov = app.add_subcommand("innovate", "entry-period advection of new words against topic history");
    innov->add_option("--entry-window", o.entry_window, "number of final periods pooled for topics");
    innov->add_option("--history", o.history, "history depth in periods");
    innov->add_option("--window", o.window, "co-occurrence window");
    innov->add_option("--m", o.m, "topic size");
    innov->add_option("--threshold", o.threshold, "minimum raw occurrences");
    innov->add_option("--words", o.words, "comma-separated words (default: every new target)");
    innov->add_option("--out", o.out, "report JSON");
    innov->add_option("--plot", o.plot, "history plot data CSV");

    auto* synth = app.add_subcommand("synth", "synthetic corpora");
    synth->require_subcommand(1);
    auto* mix = synth->add_subcommand("mixture", "sample a topic-mixture corpus");
    mix->add_option("--spec", o.spec, "mixture spec (JSON)");
    mix->add_option("--seed", o.seed, "random seed (overrides the spec)");
    mix->add_option("--out", o.out, "output directory");
    auto* inject = synth->add_subcommand("inject", "replace a growing share of a word with a synonym");
    inject->add_option("--manifest", o.manifest, "input corpus (default: the cached corpus)");
    inject->add_option("--word", o.word, "word to replace");
    inject->add_option("--synonym", o.synonym, "replacement token (default: word with a \"bis\" infix)");
    inject->add_option("--shape", o.shape, "linear | s-curve");
    inject->add_option("--steepness", o.steepness, "s-curve steepness");
    inject->add_option("--seed", o.seed, "random seed");
    inject->add_option("--out", o.out, "output directory");
    auto* shuffle = synth->add_subcommand("shuffle", "permute every token position of one period");
    shuffle->add_option("--manifest", o.manifest, "input corpus (default: the cached corpus)");
    shuffle->add_option("--period", o.period, "period id");
    shuffle->add_option("--seed", o.seed, "random seed");
    shuffle->add_option("--out", o.out, "output directory");

    app.fallthrough();
    for (auto* sub : app.get_subcommands({})) {
        sub->fallthrough();
        for (auto* leaf : sub->get_subcommands({})) leaf->fallthrough();
    }
    return cli;
}

CLI::App* active_leaf(CLI::App& app) {
    CLI::App* cur = &app;
    while (true) {
        auto subs = cur->get_subcommands();
        if (subs.empty()) return cur;
        cur = subs.front();
    }
}

std::string command_path(CLI::App& app) {
    std::string name;
    for (CLI::App* cur = active_leaf(app); cur && cur->get_parent(); cur = cur->get_parent())
        name = cur->get_name() + (name.empty() ? "" : " " + name);
    return name;
}

CLI::Option* find_option(CLI::App* leaf, const std::string& key) {
    for (CLI::App* cur = leaf; cur; cur = cur->get_parent())
        for (auto* opt : cur->get_options())
            for (const auto& n : opt->get_lnames())
                if (n == key) return opt;
    return nullptr;
}

// Config values are appended after the command line so that they win.
std::vector<std::string> config_args(const fs::path& path, CLI::App* leaf) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    auto probe = make_cli();
    std::vector<std::string> args;
    for (const auto& [key, value] : j.items()) {
        if (key == "config") throw ConfigError("config files cannot nest");
        bool known = find_option(probe->app.get(), key) != nullptr;
        for (auto* sub : probe->app->get_subcommands({})) {
            known |= find_option(sub, key) != nullptr;
            for (auto* leaf2 : sub->get_subcommands({})) known |= find_option(leaf2, key) != nullptr;
        }
        if (!known) throw ConfigError("unknown config key '" + key + "'");
        auto* opt = find_option(leaf, key);
        if (!opt) continue;
        std::string v;
        if (value.is_string()) v = value.get<std::string>();
        else if (value.is_boolean()) v = value.get<bool>() ? "true" : "false";
        else if (value.is_number()) v = value.dump();
        else if (value.is_array()) {
            for (const auto& item : value) v += (v.empty() ? "" : ",") + (item.is_string() ? item.get<std::string>() : item.dump());
        } else throw ConfigError("config key '" + key + "' has an unsupported value");
        args.push_back("--" + key + "=" + v);
    }
    return args;
}

fs::path cache_dir(const Options& o) {
    if (!o.cache.empty()) return o.cache;
    if (const char* env = std::getenv("ADVECT_CACHE_DIR"); env && *env) return env;
    return "advect-cache";
}

fs::path corpus_path(const Options& o) { return cache_dir(o) / "corpus.txt"; }

fs::path or_default(const std::string& given, const fs::path& fallback) { return given.empty() ? fallback : fs::path(given); }

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

PeriodCorpus load_cached(const Options& o) {
    auto p = corpus_path(o);
    if (!fs::exists(p)) throw MissingArtifactError("no cached corpus at '" + p.string() + "'; run 'advect ingest' first");
    return load_corpus(p);
}

PeriodCorpus corpus_input(const Options& o) {
    if (o.manifest.empty()) return load_cached(o);
    return ingest(Manifest::load(o.manifest), FilterConfig{});
}

std::size_t period_of(const PeriodCorpus& c, const std::string& id) {
    if (id.empty()) throw ConfigError("--period is required");
    return c.period_index(id);
}

TopicParams topic_params(const Options& o) {
    TopicParams tp;
    tp.cooc.window = o.window;
    tp.cooc.threshold = o.threshold;
    tp.cooc.threads = o.threads;
    tp.m = o.m;
    return tp;
}

LdaParams lda_params(const Options& o) {
    LdaParams p;
    p.k = o.k;
    p.alpha = o.alpha;
    p.beta = o.beta;
    p.max_iters = o.iters;
    p.seed = o.seed.value_or(1);
    return p;
}

fs::path lda_dir(const Options& o, const Smoothing& s) {
    auto name = s.name();
    std::replace(name.begin(), name.end(), ':', '-');
    return cache_dir(o) / "lda" / name;
}

void write_run_metadata(CLI::App& app, const Options& o, const std::vector<std::string>& artifacts) {
    json meta;
    meta["tool"] = "advect";
    meta["version"] = kVersion;
    meta["command"] = command_path(app);
    json cfg = json::object();
    for (CLI::App* cur = active_leaf(app); cur; cur = cur->get_parent())
        for (auto* opt : cur->get_options()) {
            if (opt->get_lnames().empty()) continue;
            const auto& name = opt->get_lnames().front();
            if (name == "help" || name == "version" || cfg.contains(name)) continue;
            std::string v;
            if (opt->count()) {
                for (const auto& r : opt->results()) v = r;
            } else {
                v = opt->get_default_str();
            }
            cfg[name] = v;
        }
    meta["config"] = cfg;
    meta["seed"] = o.seed ? json(*o.seed) : json(nullptr);
    meta["artifacts"] = artifacts;
    auto name = meta["command"].get<std::string>();
    std::replace(name.begin(), name.end(), ' ', '-');
    auto out = open_output(cache_dir(o) / "runs" / (name + ".json"));
    out << meta.dump(2) << '\n';
}

std::vector<std::string> cmd_ingest(const Options& o) {
    if (o.manifest.empty()) throw ConfigError("ingest needs --manifest");
    auto manifest = Manifest::load(o.manifest);
    if (!o.format.empty()) manifest.format = parse_format(o.format);
    FilterConfig cfg;
    if (!o.stopwords.empty()) cfg.stopwords = load_word_list(o.stopwords);
    if (!o.ocr.empty()) cfg.ocr_errors = load_word_list(o.ocr);
    cfg.content_pos = split_list(o.content_pos);
    cfg.target_pos = split_list(o.target_pos);
    cfg.min_length = o.min_length;
    cfg.drop_capitalized = !o.keep_capitalized;
    cfg.use_lemma = o.use_lemma;
    auto corpus = ingest(manifest, cfg);
    fs::create_directories(cache_dir(o));
    save_corpus(corpus, corpus_path(o));
    auto stats = cache_dir(o) / "corpus-stats.csv";
    auto out = open_output(stats);
    write_corpus_stats(corpus, out);
    std::cout << "ingested " << corpus.total_tokens() << " tokens in " << corpus.num_periods() << " periods\n";
    return {corpus_path(o).string(), stats.string()};
}

std::vector<std::string> cmd_freq(const Options& o) {
    auto corpus = load_cached(o);
    auto table = count_frequencies(corpus, parse_token_class(o.token_class));
    auto path = or_default(o.out, cache_dir(o) / "freqs.csv");
    auto out = open_output(path);
    write_frequency_csv(table, out);
    return {path.string()};
}

std::vector<std::string> cmd_topics(const Options& o) {
    auto corpus = load_cached(o);
    auto smoothing = Smoothing::parse(o.smooth);
    auto tp = topic_params(o);
    tp.targets_only = !o.all_words;
    std::vector<std::size_t> periods;
    if (o.period.empty())
        for (std::size_t t = 0; t < corpus.num_periods(); ++t) periods.push_back(t);
    else
        periods.push_back(period_of(corpus, o.period));
    auto path = or_default(o.out, cache_dir(o) / "topics.csv");
    auto out = open_output(path);
    bool header = true;
    for (auto t : periods) {
        auto model = estimate_topics(corpus, t, smoothing, tp);
        std::vector<TopicVector> tvs;
        for (const auto& w : model.targets()) tvs.push_back(model.topic(w));
        write_topics_csv(tvs, out, header);
        header = false;
    }
    if (header) write_topics_csv({}, out, true);
    return {path.string()};
}

std::vector<std::string> cmd_lda_train(const Options& o) {
    auto corpus = load_cached(o);
    auto smoothing = Smoothing::parse(o.smooth);
    auto params = lda_params(o);
    std::vector<std::size_t> periods;
    if (o.period.empty())
        for (std::size_t t = 1; t < corpus.num_periods(); ++t) periods.push_back(t);
    else
        periods.push_back(period_of(corpus, o.period));
    auto dir = lda_dir(o, smoothing);
    std::vector<std::string> artifacts;
    for (auto t : periods) {
        auto input = prepare_lda_input(topic_dataset(corpus, t, smoothing), corpus.vocab, o.threshold);
        if (input.docs.empty()) {
            std::clog << "warning: no word meets the threshold in period " << corpus.periods[t] << "; no model\n";
            continue;
        }
        auto model = train_lda(input, params);
        auto path = dir / (corpus.periods[t] + ".lda");
        auto out = open_output(path);
        save_lda(model, out);
        std::cout << corpus.periods[t] << ": " << model.iterations() << " sweeps\n";
        artifacts.push_back(path.string());
    }
    return artifacts;
}

std::vector<std::string> cmd_advect(const Options& o) {
    auto corpus = load_cached(o);
    auto table = count_frequencies(corpus);
    AdvectionParams params;
    params.variant = parse_variant(o.variant);
    params.smoothing = Smoothing::parse(o.smooth);
    params.topics = topic_params(o);
    for (const auto& w : split_list(o.words)) params.words.insert(w);
    std::vector<AdvectionRecord> records;
    if (params.variant == Variant::ppmi) {
        records = advection_series(corpus, table, params);
    } else {
        auto dir = lda_dir(o, params.smoothing);
        std::vector<std::optional<LdaModel>> models(corpus.num_periods());
        for (std::size_t t = 1; t < corpus.num_periods(); ++t) {
            auto path = dir / (corpus.periods[t] + ".lda");
            if (!fs::exists(path))
                throw MissingArtifactError("no LDA model at '" + path.string() + "'; run 'advect lda-train --smooth " +
                                           params.smoothing.name() + "' first");
            std::ifstream in(path);
            models[t] = load_lda(in, path.string());
        }
        records = advection_series(table, models, params);
    }
    auto path = or_default(o.out, cache_dir(o) / "advection.csv");
    auto out = open_output(path);
    write_advection_csv(records, out);
    auto scatter = or_default(o.scatter, cache_dir(o) / "scatter.csv");
    auto sc = open_output(scatter);
    write_scatter_csv(records, sc);
    std::cout << records.size() << " advection records\n";
    return {path.string(), scatter.string()};
}

std::vector<AdvectionRecord> load_records(const Options& o, const std::vector<std::string>& periods = {}) {
    auto path = or_default(o.in, cache_dir(o) / "advection.csv");
    if (!fs::exists(path))
        throw MissingArtifactError("no advection records at '" + path.string() + "'; run 'advect advect' first");
    std::ifstream in(path);
    return read_advection_csv(in, periods);
}

std::vector<std::string> cmd_eval(const Options& o) {
    auto records = load_records(o);
    Grouping g;
    if (o.by == "period") g = Grouping::per_period;
    else if (o.by == "pooled") g = Grouping::pooled;
    else throw ConfigError("--by must be 'period' or 'pooled'");
    auto path = or_default(o.out, cache_dir(o) / "r2.csv");
    auto out = open_output(path);
    auto fits = eval_r2(records, g);
    write_fit_csv(fits, out);
    for (const auto& f : fits)
        std::cout << f.group << ": R2=" << (f.r2 ? csv::number(*f.r2) : "undefined") << " n=" << f.n << '\n';
    std::vector<std::string> artifacts{path.string()};
    if (!o.residuals.empty()) {
        auto rout = open_output(o.residuals);
        csv::Writer w(rout);
        w.row("period", "word", "residual");
        if (g == Grouping::pooled) {
            if (auto r = residuals(records))
                for (const auto& rec : records) w.row(rec.period, rec.word, r->at(rec.word));
        } else {
            auto by = residuals_by_period(records);
            for (const auto& rec : records) {
                auto it = by.find(rec.period);
                if (it != by.end()) w.row(rec.period, rec.word, it->second.at(rec.word));
            }
        }
        artifacts.push_back(o.residuals);
    }
    return artifacts;
}

std::vector<std::string> cmd_adjust(const Options& o) {
    if (o.word.empty()) throw ConfigError("adjust needs --word");
    auto corpus = load_cached(o);
    auto table = count_frequencies(corpus);
    auto records = load_records(o, corpus.periods);
    auto series = adjusted_series(table, o.word, records);
    auto path = or_default(o.out, cache_dir(o) / ("series-" + o.word + ".csv"));
    auto out = open_output(path);
    write_series_csv(series, out);
    return {path.string()};
}

std::vector<std::string> cmd_innovate(const Options& o) {
    auto corpus = load_cached(o);
    if (corpus.num_periods() < 2) throw DomainError("innovation test needs at least two periods");
    if (o.entry_window < 1) throw ConfigError("--entry-window must be at least 1");
    auto table = count_frequencies(corpus);
    const std::size_t last = corpus.num_periods() - 1;
    const std::size_t first = last + 1 > o.entry_window ? last + 1 - o.entry_window : 1;
    TopicParams tp = topic_params(o);
    auto model = estimate_topics(corpus, last, Smoothing::window(o.entry_window), tp);
    std::vector<std::pair<std::string, std::size_t>> candidates;
    if (o.words.empty()) {
        candidates = novel_words(model, table, std::max<std::size_t>(first, 1), last);
    } else {
        for (const auto& w : split_list(o.words)) {
            auto p = first_occurrence(table, w);
            if (!p) throw LookupError("'" + w + "' does not occur in the corpus");
            candidates.emplace_back(w, *p);
        }
    }
    std::vector<InnovationReport> reports;
    json skipped = json::array();
    for (const auto& [w, entry] : candidates) {
        try {
            reports.push_back(innovation_test(w, model, table, entry, o.history));
        } catch (const InsufficientHistoryError& e) {
            skipped.push_back({{"word", w}, {"reason", e.what()}});
        } catch (const DomainError& e) {
            skipped.push_back({{"word", w}, {"reason", e.what()}});
        } catch (const LookupError& e) {
            skipped.push_back({{"word", w}, {"reason", e.what()}});
        }
    }
    json doc;
    doc["reports"] = json::array();
    for (const auto& r : reports) doc["reports"].push_back(to_json(r));
    doc["skipped"] = skipped;
    doc["ttest"] = nullptr;
    std::size_t finite = 0;
    for (const auto& r : reports) finite += r.z.has_value();
    if (finite >= 2) {
        if (auto t = innovation_ttest(reports)) doc["ttest"] = {{"t", t->t}, {"df", t->df}, {"p", t->p}};
    }
    std::size_t counts[3] = {0, 0, 0};
    for (const auto& r : reports) ++counts[static_cast<int>(r.classification)];
    doc["summary"] = {{"below", counts[0]}, {"within", counts[1]}, {"above", counts[2]}};
    auto path = or_default(o.out, cache_dir(o) / "reports.json");
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    auto plot = or_default(o.plot, cache_dir(o) / "innovation.csv");
    auto pout = open_output(plot);
    write_innovation_csv(reports, pout);
    std::cout << reports.size() << " reports: " << counts[2] << " above, " << counts[1] << " within, " << counts[0]
              << " below\n";
    return {path.string(), plot.string()};
}

fs::path synth_out(const Options& o) {
    if (o.out.empty()) throw ConfigError("synth needs --out");
    return o.out;
}

std::vector<std::string> cmd_synth_mixture(const Options& o) {
    if (o.spec.empty()) throw ConfigError("synth mixture needs --spec");
    std::ifstream in(o.spec);
    if (!in) throw ConfigError("cannot open spec '" + o.spec + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("spec '" + o.spec + "' is not valid JSON: " + e.what());
    }
    auto spec = synth::mixture_from_json(j);
    if (o.seed) spec.seed = *o.seed;
    auto gen = synth::generate_mixture(spec);
    auto dir = synth_out(o);
    write_vertical_corpus(gen.corpus, dir);
    return {(dir / "manifest.json").string()};
}

std::vector<std::string> cmd_synth_inject(const Options& o) {
    if (o.word.empty()) throw ConfigError("synth inject needs --word");
    auto corpus = corpus_input(o);
    auto synonym = o.synonym;
    if (synonym.empty()) {
        auto bare = strip_target_marker(o.word);
        synonym = bare + "bis" + (is_target_token(o.word) ? std::string(kTargetMarker) : std::string());
    }
    synth::ReplacementSchedule schedule;
    if (o.shape == "linear")
        schedule = synth::ReplacementSchedule::linear(o.word, synonym, corpus.num_periods());
    else if (o.shape == "s-curve")
        schedule = synth::ReplacementSchedule::s_curve(o.word, synonym, corpus.num_periods(), o.steepness);
    else
        throw ConfigError("--shape must be 'linear' or 's-curve'");
    auto out = synth::inject_synonym(corpus, schedule, o.seed.value_or(1));
    auto dir = synth_out(o);
    write_vertical_corpus(out, dir);
    return {(dir / "manifest.json").string()};
}

std::vector<std::string> cmd_synth_shuffle(const Options& o) {
    auto corpus = corpus_input(o);
    auto out = synth::shuffle_period(corpus, period_of(corpus, o.period), o.seed.value_or(1));
    auto dir = synth_out(o);
    write_vertical_corpus(out, dir);
    return {(dir / "manifest.json").string()};
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);

    auto first = make_cli();
    try {
        first->app->parse(std::vector<std::string>(args));
    } catch (const CLI::ParseError& e) {
        int code = first->app->exit(e);
        return code == 0 ? 0 : 1;
    }
    auto* cli = first.get();
    std::unique_ptr<Cli> second;
    if (!first->o.config.empty()) {
        // CLI11 takes arguments in reverse order: prepending puts config values last.
        auto extra = config_args(first->o.config, active_leaf(*first->app));
        std::vector<std::string> merged(extra.rbegin(), extra.rend());
        merged.insert(merged.end(), args.begin(), args.end());
        second = make_cli();
        try {
            second->app->parse(merged);
        } catch (const CLI::ParseError& e) {
            std::cerr << "error in config file: " << e.what() << '\n';
            return 1;
        }
        cli = second.get();
    }

    const auto& o = cli->o;
    if (o.threads < 1) throw ConfigError("--threads must be at least 1");
    auto command = command_path(*cli->app);
    std::vector<std::string> artifacts;
    if (command == "ingest") artifacts = cmd_ingest(o);
    else if (command == "freq") artifacts = cmd_freq(o);
    else if (command == "topics") artifacts = cmd_topics(o);
    else if (command == "lda-train") artifacts = cmd_lda_train(o);
    else if (command == "advect") artifacts = cmd_advect(o);
    else if (command == "eval") artifacts = cmd_eval(o);
    else if (command == "adjust") artifacts = cmd_adjust(o);
    else if (command == "innovate") artifacts = cmd_innovate(o);
    else if (command == "synth mixture") artifacts = cmd_synth_mixture(o);
    else if (command == "synth inject") artifacts = cmd_synth_inject(o);
    else if (command == "synth shuffle") artifacts = cmd_synth_shuffle(o);
    else throw std::logic_error("unhandled command '" + command + "'");
    write_run_metadata(*cli->app, o, artifacts);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const advect::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
