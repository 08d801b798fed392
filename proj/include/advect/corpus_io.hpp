#pragma once

#include <glob.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "advect/corpus.hpp"

namespace advect {

enum class CorpusFormat { vertical, plain };

inline CorpusFormat parse_format(std::string_view s) {
    if (s == "vertical" || s == "vertical-tsv") return CorpusFormat::vertical;
    if (s == "plain" || s == "plain-text") return CorpusFormat::plain;
    throw ConfigError("unknown corpus format '" + std::string(s) + "'");
}

namespace detail {

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot read '" + path.string() + "'");
    return in;
}

inline std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

inline bool is_edge_punct(unsigned char c) {
    return std::ispunct(c) && c != '<' && c != '>' && c != '_';
}

} // namespace detail

/// Reads a `form<TAB>lemma<TAB>pos` file; lines starting with "##" delimit documents.
inline std::vector<RawDocument> parse_vertical(const std::filesystem::path& path, const std::string& period,
                                               const std::string& genre = {}) {
    auto in = detail::open_input(path);
    std::vector<RawDocument> docs;
    RawDocument current{{}, period, genre, path.string()};
    auto flush = [&] {
        if (!current.tokens.empty()) docs.push_back(std::move(current));
        current = RawDocument{{}, period, genre, path.string()};
    };
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        detail::chomp(line);
        if (line.starts_with("##")) {
            flush();
            continue;
        }
        if (line.empty()) continue;
        auto fields = detail::split(line, '\t');
        if (fields.size() != 3)
            throw ParseError(path.string() + ": expected 3 tab-separated fields, got " +
                                 std::to_string(fields.size()),
                             lineno);
        RawToken tok{fields[0], std::nullopt, std::nullopt};
        if (!fields[1].empty()) tok.lemma = fields[1];
        if (!fields[2].empty()) tok.pos = fields[2];
        current.tokens.push_back(std::move(tok));
    }
    if (in.bad()) throw IngestError("error while reading '" + path.string() + "'");
    flush();
    return docs;
}

/// One file is one document; whitespace tokenized, edge punctuation stripped.
inline RawDocument parse_plain(const std::filesystem::path& path, const std::string& period,
                               const std::string& genre = {}) {
    auto in = detail::open_input(path);
    RawDocument doc{{}, period, genre, path.string()};
    std::string word;
    while (in >> word) {
        std::size_t b = 0, e = word.size();
        while (b < e && detail::is_edge_punct(static_cast<unsigned char>(word[b]))) ++b;
        while (e > b && detail::is_edge_punct(static_cast<unsigned char>(word[e - 1]))) --e;
        if (b < e) doc.tokens.push_back({word.substr(b, e - b), std::nullopt, std::nullopt});
    }
    if (in.bad()) throw IngestError("error while reading '" + path.string() + "'");
    return doc;
}

struct ManifestEntry {
    std::string period;
    std::string pattern;
    std::string genre;
};

/// Period order, format and file globs. JSON layout:
///   {"format": "vertical", "periods": ["1900", "1910"],
///    "inputs": [{"period": "1900", "glob": "1900s/*.txt", "genre": "fic"}, ...]}
/// Globs are resolved relative to the manifest; a trailing "/" means every file in that
/// directory.
struct Manifest {
    CorpusFormat format = CorpusFormat::vertical;
    std::vector<std::string> periods;
    std::vector<ManifestEntry> inputs;
    std::filesystem::path base_dir;

    static Manifest from_json(const nlohmann::json& j, std::filesystem::path base = {}) {
        Manifest m;
        m.base_dir = std::move(base);
        try {
            if (j.contains("format")) m.format = parse_format(j.at("format").get<std::string>());
            if (j.contains("periods")) m.periods = j.at("periods").get<std::vector<std::string>>();
            for (const auto& e : j.at("inputs")) {
                ManifestEntry entry;
                if (!e.contains("period") || e.at("period").get<std::string>().empty())
                    throw ConfigError("manifest input " + e.dump() + " is mapped to no period");
                entry.period = e.at("period").get<std::string>();
                entry.pattern = e.at("glob").get<std::string>();
                if (e.contains("genre")) entry.genre = e.at("genre").get<std::string>();
                m.inputs.push_back(std::move(entry));
            }
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError(std::string("malformed manifest: ") + ex.what());
        }
        if (m.periods.empty()) {
            std::set<std::string> seen;
            for (const auto& e : m.inputs)
                if (seen.insert(e.period).second) m.periods.push_back(e.period);
        }
        return m;
    }

    static Manifest load(const std::filesystem::path& path) {
        auto in = detail::open_input(path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError("manifest '" + path.string() + "' is not valid JSON: " + ex.what());
        }
        return from_json(j, path.parent_path());
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["format"] = format == CorpusFormat::vertical ? "vertical" : "plain";
        j["periods"] = periods;
        j["inputs"] = nlohmann::json::array();
        for (const auto& e : inputs) {
            nlohmann::json ej{{"period", e.period}, {"glob", e.pattern}};
            if (!e.genre.empty()) ej["genre"] = e.genre;
            j["inputs"].push_back(ej);
        }
        return j;
    }
};

/// Expands a manifest pattern to a sorted list of regular files.
inline std::vector<std::filesystem::path> expand_pattern(const std::filesystem::path& base,
                                                         const std::string& pattern) {
    namespace fs = std::filesystem;
    fs::path p = fs::path(pattern).is_absolute() ? fs::path(pattern) : base / pattern;
    std::vector<fs::path> out;
    if (!pattern.empty() && pattern.back() == '/') {
        if (!fs::is_directory(p)) throw IngestError("cannot read directory '" + p.string() + "'");
        for (const auto& e : fs::directory_iterator(p))
            if (e.is_regular_file()) out.push_back(e.path());
    } else {
        glob_t g{};
        int rc = ::glob(p.c_str(), 0, nullptr, &g);
        if (rc == 0)
            for (std::size_t i = 0; i < g.gl_pathc; ++i)
                if (fs::is_regular_file(g.gl_pathv[i])) out.emplace_back(g.gl_pathv[i]);
        globfree(&g);
    }
    if (out.empty()) throw ConfigError("input pattern '" + pattern + "' matched no files");
    std::sort(out.begin(), out.end());
    return out;
}

/// Reads every file named by the manifest, in manifest order.
inline std::vector<RawDocument> parse_corpus(const Manifest& manifest) {
    std::vector<RawDocument> docs;
    for (const auto& entry : manifest.inputs) {
        for (const auto& file : expand_pattern(manifest.base_dir, entry.pattern)) {
            if (manifest.format == CorpusFormat::vertical) {
                auto part = parse_vertical(file, entry.period, entry.genre);
                std::move(part.begin(), part.end(), std::back_inserter(docs));
            } else {
                docs.push_back(parse_plain(file, entry.period, entry.genre));
            }
        }
    }
    return docs;
}

/// Full ingest: parse, clean, bin.
inline PeriodCorpus ingest(const Manifest& manifest, const FilterConfig& cfg) {
    cfg.validate();
    auto raw = parse_corpus(manifest);
    std::vector<CleanDocument> clean;
    clean.reserve(raw.size());
    for (const auto& d : raw) clean.push_back(preprocess(d, cfg));
    return bin_periods(clean, manifest.periods);
}

/// Newline-delimited word list; blank lines and '#' comments skipped; lowercased.
inline std::set<std::string> load_word_list(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        detail::chomp(line);
        if (line.empty() || line.front() == '#') continue;
        out.insert(detail::to_lower(line));
    }
    return out;
}

// Cache layout (text):
//   advect-corpus 1
//   periods<TAB>p1<TAB>p2...
//   doc<TAB>period<TAB>genre<TAB>source
//   tok tok tok ...
inline void save_corpus(const PeriodCorpus& corpus, std::ostream& out) {
    out << "advect-corpus 1\nperiods";
    for (const auto& p : corpus.periods) out << '\t' << p;
    out << '\n';
    for (std::size_t p = 0; p < corpus.num_periods(); ++p) {
        for (const auto& d : corpus.documents[p]) {
            out << "doc\t" << corpus.periods[p] << '\t' << d.genre << '\t' << d.source << '\n';
            for (std::size_t i = 0; i < d.tokens.size(); ++i) {
                if (i) out << ' ';
                out << corpus.vocab.word(d.tokens[i]);
            }
            out << '\n';
        }
    }
}

inline void save_corpus(const PeriodCorpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IngestError("cannot write '" + path.string() + "'");
    save_corpus(corpus, out);
}

inline PeriodCorpus load_corpus(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line) || line != "advect-corpus 1")
        throw ParseError(name + ": not a corpus cache", lineno);
    ++lineno;
    if (!std::getline(in, line) || !line.starts_with("periods"))
        throw ParseError(name + ": missing period header", lineno);
    auto header = detail::split(line, '\t');
    std::vector<std::string> order(header.begin() + 1, header.end());
    if (line == "periods") order.clear();
    auto corpus = PeriodCorpus::with_periods(order);
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = detail::split(line, '\t');
        if (f.size() != 4 || f[0] != "doc") throw ParseError(name + ": expected document header", lineno);
        auto p = corpus.period_index(f[1]);
        Document d{{}, f[2], f[3]};
        std::string body;
        ++lineno;
        if (!std::getline(in, body)) throw ParseError(name + ": truncated document", lineno);
        std::istringstream ss(body);
        std::string tok;
        while (ss >> tok) d.tokens.push_back(corpus.vocab.intern(tok));
        corpus.documents[p].push_back(std::move(d));
    }
    corpus.recompute_totals();
    return corpus;
}

inline PeriodCorpus load_corpus(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw MissingArtifactError("corpus cache '" + path.string() + "' not found; run ingest first");
    auto in = detail::open_input(path);
    return load_corpus(in, path.string());
}

/// Writes `period,genre,tokens,types`. One "all" row per period, then one row per genre.
inline void write_corpus_stats(const PeriodCorpus& corpus, std::ostream& out) {
    out << "period,genre,tokens,types\n";
    for (std::size_t p = 0; p < corpus.num_periods(); ++p) {
        std::set<WordId> all;
        std::map<std::string, std::set<WordId>> by_genre;
        for (const auto& d : corpus.documents[p]) {
            all.insert(d.tokens.begin(), d.tokens.end());
            if (!d.genre.empty()) by_genre[d.genre].insert(d.tokens.begin(), d.tokens.end());
        }
        out << corpus.periods[p] << ",all," << corpus.token_totals[p] << ',' << all.size() << '\n';
        for (const auto& [g, types] : by_genre)
            out << corpus.periods[p] << ',' << g << ',' << corpus.genre_totals[p].at(g) << ',' << types.size()
                << '\n';
    }
}

/// Writes the corpus as vertical files (one per period) plus a manifest that ingests
/// them back to the same tokens. Target-marked tokens get tag "nn1", others "jj".
inline void write_vertical_corpus(const PeriodCorpus& corpus, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    Manifest m;
    m.periods = corpus.periods;
    for (std::size_t p = 0; p < corpus.num_periods(); ++p) {
        std::map<std::string, std::vector<const Document*>> by_genre;
        for (const auto& d : corpus.documents[p]) by_genre[d.genre].push_back(&d);
        for (const auto& [genre, docs] : by_genre) {
            std::string name = "period_" + corpus.periods[p] + (genre.empty() ? "" : "_" + genre) + ".vrt";
            std::ofstream out(dir / name);
            if (!out) throw IngestError("cannot write '" + (dir / name).string() + "'");
            for (const auto* d : docs) {
                out << "##\n";
                for (auto id : d->tokens) {
                    const auto& w = corpus.vocab.word(id);
                    bool target = is_target_token(w);
                    auto bare = strip_target_marker(w);
                    out << bare << '\t' << bare << '\t' << (target ? "nn1" : "jj") << '\n';
                }
            }
            m.inputs.push_back({corpus.periods[p], name, genre});
        }
    }
    std::ofstream mf(dir / "manifest.json");
    if (!mf) throw IngestError("cannot write manifest in '" + dir.string() + "'");
    mf << m.to_json().dump(2) << '\n';
}

} // namespace advect
