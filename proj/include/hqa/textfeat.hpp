#pragma once

// Tokenization and the two bag-of-words featurizers: binary presence vectors
// over a frequency vocabulary, and TFIDF vectors over a vocabulary selected
// by class-association chi-squared. Vocabularies are fitted on the training
// split only; encoders never mutate them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "hqa/corpus.hpp"
#include "hqa/util.hpp"

namespace hqa::textfeat {

using corpus::Corpus;
using corpus::Label;
using json = nlohmann::json;

enum class TokenizerMode { UnicodeWords, Whitespace, Pretokenized };

struct TokenizerConfig {
    TokenizerMode mode = TokenizerMode::UnicodeWords;
    bool lowercase = true;
    std::shared_ptr<const std::unordered_set<std::string>> stopwords;  // null = keep everything

    TokenizerConfig without_stopwords() const {
        TokenizerConfig c = *this;
        c.stopwords.reset();
        return c;
    }
};

inline std::shared_ptr<const std::unordered_set<std::string>> load_stopwords(
    const std::filesystem::path& path) {
    auto set = std::make_shared<std::unordered_set<std::string>>();
    for (const auto& line : split_lines(read_text_file(path)))
        if (!line.empty()) set->insert(line);
    return set;
}

namespace detail {

inline bool in_ranges(char32_t cp, std::initializer_list<std::pair<char32_t, char32_t>> ranges) {
    for (const auto& [lo, hi] : ranges)
        if (cp >= lo && cp <= hi) return true;
    return false;
}

// CJK ideographs carry meaning per character; without a segmenter each one
// becomes its own token.
inline bool is_cjk_ideograph(char32_t cp) {
    return in_ranges(cp, {{0x4E00, 0x9FFF}, {0x3400, 0x4DBF}, {0xF900, 0xFAFF}});
}

inline bool is_word_char(char32_t cp) {
    if (cp < 0x80)
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
    // Everything non-ASCII counts as word material except common punctuation
    // and whitespace blocks.
    if (in_ranges(cp, {{0x00A0, 0x00BF},
                       {0x2000, 0x206F},
                       {0x3000, 0x303F},
                       {0xFF01, 0xFF0F},
                       {0xFF1A, 0xFF20},
                       {0xFF3B, 0xFF40},
                       {0xFF5B, 0xFF65}}))
        return false;
    return true;
}

inline bool is_space_char(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0x3000 || cp == 0x00A0;
}

inline char32_t to_lower_ascii(char32_t cp) {
    return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
}

}  // namespace detail

inline std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg) {
    std::vector<std::string> tokens;
    const auto cps = decode_utf8(text);
    std::string current;
    const auto flush = [&]() {
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    };
    if (cfg.mode == TokenizerMode::UnicodeWords) {
        for (char32_t cp : cps) {
            if (cfg.lowercase) cp = detail::to_lower_ascii(cp);
            if (detail::is_cjk_ideograph(cp)) {
                flush();
                append_utf8(cp, current);
                flush();
            } else if (detail::is_word_char(cp)) {
                append_utf8(cp, current);
            } else {
                flush();
            }
        }
        flush();
    } else {
        // Whitespace mode splits on blank runs; pretokenized input carries
        // explicit separators and is split the same way but never refolded.
        for (char32_t cp : cps) {
            if (detail::is_space_char(cp)) {
                flush();
            } else {
                if (cfg.mode == TokenizerMode::Whitespace && cfg.lowercase)
                    cp = detail::to_lower_ascii(cp);
                append_utf8(cp, current);
            }
        }
        flush();
    }
    if (cfg.stopwords) {
        std::vector<std::string> kept;
        kept.reserve(tokens.size());
        for (auto& t : tokens)
            if (!cfg.stopwords->count(t)) kept.push_back(std::move(t));
        tokens = std::move(kept);
    }
    return tokens;
}

enum class Selection { Frequency, ChiTfidf };

struct Vocabulary {
    std::vector<std::string> terms;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::size_t> doc_freq;
    std::size_t n_docs = 0;
    Selection selection = Selection::Frequency;

    std::size_t size() const { return terms.size(); }

    void rebuild_index() {
        index.clear();
        for (std::size_t i = 0; i < terms.size(); ++i) index[terms[i]] = i;
    }
};

struct SparseTextVector {
    std::vector<std::size_t> indices;  // strictly increasing, < dim
    std::vector<double> values;
    std::size_t dim = 0;
};

namespace detail {

struct TermStats {
    // Deterministic iteration: term -> (collection freq, doc freq, per-class doc freq).
    std::map<std::string, std::array<std::size_t, 4>> stats;  // cf, df, df_high, df_low
    std::size_t n_docs = 0;
    std::size_t n_high = 0;
};

inline TermStats collect_term_stats(const Corpus& train, const TokenizerConfig& cfg) {
    TermStats ts;
    for (const auto& qa : train.pairs) {
        ts.n_docs++;
        const bool is_high = qa.label == Label::High;
        ts.n_high += is_high;
        const auto tokens = tokenize(qa.answer_text, cfg);
        std::unordered_set<std::string> seen;
        for (const auto& t : tokens) {
            auto& row = ts.stats[t];
            row[0]++;
            if (seen.insert(t).second) {
                row[1]++;
                if (is_high)
                    row[2]++;
                else
                    row[3]++;
            }
        }
    }
    return ts;
}

}  // namespace detail

// Pearson chi-squared for a 2x2 presence-vs-class table, no continuity
// correction; zero when any margin is empty.
inline double chi2_2x2(double a, double b, double c, double d) {
    const double n = a + b + c + d;
    const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) return 0.0;
    const double diff = a * d - b * c;
    return n * diff * diff / (r1 * r2 * c1 * c2);
}

// Top `size` answer tokens by collection frequency, ties lexicographic.
inline Vocabulary build_vocabulary(const Corpus& train, std::size_t size,
                                   const TokenizerConfig& cfg) {
    if (train.pairs.empty()) throw ValidationError("build_vocabulary: empty training corpus");
    if (size == 0) throw ValidationError("build_vocabulary: size must be positive");
    const auto ts = detail::collect_term_stats(train, cfg);
    std::vector<std::pair<std::string, std::size_t>> by_freq;
    by_freq.reserve(ts.stats.size());
    for (const auto& [term, row] : ts.stats) by_freq.emplace_back(term, row[0]);
    std::sort(by_freq.begin(), by_freq.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
    });
    if (by_freq.size() > size) by_freq.resize(size);
    Vocabulary v;
    v.selection = Selection::Frequency;
    v.n_docs = ts.n_docs;
    std::sort(by_freq.begin(), by_freq.end());  // stable positional order by term
    for (const auto& [term, cf] : by_freq) {
        (void)cf;
        v.terms.push_back(term);
        v.doc_freq.push_back(ts.stats.at(term)[1]);
    }
    v.rebuild_index();
    return v;
}

// Top `size` answer tokens by presence-vs-class chi-squared; ties broken by
// higher collection frequency, then lexicographically.
inline Vocabulary chi_tfidf_vocabulary(const Corpus& train, std::size_t size,
                                       const TokenizerConfig& cfg) {
    if (train.pairs.empty()) throw ValidationError("chi_tfidf_vocabulary: empty training corpus");
    if (size == 0) throw ValidationError("chi_tfidf_vocabulary: size must be positive");
    corpus::require_labels(train);
    const auto ts = detail::collect_term_stats(train, cfg);
    const std::size_t n_low = ts.n_docs - ts.n_high;
    if (ts.n_high == 0 || n_low == 0)
        throw ValidationError("chi_tfidf_vocabulary: training set has a single class");
    struct Scored {
        std::string term;
        double chi2;
        std::size_t cf;
    };
    std::vector<Scored> scored;
    scored.reserve(ts.stats.size());
    for (const auto& [term, row] : ts.stats) {
        const double a = static_cast<double>(row[2]);                  // present, high
        const double b = static_cast<double>(row[3]);                  // present, low
        const double c = static_cast<double>(ts.n_high) - a;           // absent, high
        const double d = static_cast<double>(n_low) - b;               // absent, low
        scored.push_back({term, chi2_2x2(a, b, c, d), row[0]});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& x, const Scored& y) {
        if (x.chi2 != y.chi2) return x.chi2 > y.chi2;
        if (x.cf != y.cf) return x.cf > y.cf;
        return x.term < y.term;
    });
    if (scored.size() > size) scored.resize(size);
    std::sort(scored.begin(), scored.end(),
              [](const Scored& x, const Scored& y) { return x.term < y.term; });
    Vocabulary v;
    v.selection = Selection::ChiTfidf;
    v.n_docs = ts.n_docs;
    for (const auto& s : scored) {
        v.terms.push_back(s.term);
        v.doc_freq.push_back(ts.stats.at(s.term)[1]);
    }
    v.rebuild_index();
    return v;
}

inline SparseTextVector encode_binary(std::string_view answer, const Vocabulary& v,
                                      const TokenizerConfig& cfg) {
    SparseTextVector out;
    out.dim = v.size();
    std::vector<bool> present(v.size(), false);
    for (const auto& t : tokenize(answer, cfg)) {
        auto it = v.index.find(t);
        if (it != v.index.end()) present[it->second] = true;
    }
    for (std::size_t i = 0; i < present.size(); ++i) {
        if (present[i]) {
            out.indices.push_back(i);
            out.values.push_back(1.0);
        }
    }
    return out;
}

// weight(t) = tf(t, answer) * ln(n_docs / doc_freq[t]); raw term counts.
inline SparseTextVector encode_tfidf(std::string_view answer, const Vocabulary& v,
                                     const TokenizerConfig& cfg) {
    SparseTextVector out;
    out.dim = v.size();
    std::vector<std::size_t> tf(v.size(), 0);
    for (const auto& t : tokenize(answer, cfg)) {
        auto it = v.index.find(t);
        if (it != v.index.end()) tf[it->second]++;
    }
    for (std::size_t i = 0; i < tf.size(); ++i) {
        if (tf[i] == 0) continue;
        const double idf = std::log(static_cast<double>(v.n_docs) /
                                    static_cast<double>(v.doc_freq[i]));
        const double w = static_cast<double>(tf[i]) * idf;
        if (w != 0.0) {
            out.indices.push_back(i);
            out.values.push_back(w);
        }
    }
    return out;
}

inline json vocabulary_to_json(const Vocabulary& v) {
    json j;
    j["terms"] = v.terms;
    j["doc_freq"] = v.doc_freq;
    j["n_docs"] = v.n_docs;
    j["selection"] = v.selection == Selection::Frequency ? "frequency" : "chi_tfidf";
    return j;
}

inline Vocabulary vocabulary_from_json(const json& j) {
    Vocabulary v;
    if (!j.is_object() || !j.contains("terms") || !j.contains("doc_freq") ||
        !j.contains("n_docs") || !j.contains("selection"))
        throw ValidationError("vocabulary: malformed JSON");
    v.terms = j.at("terms").get<std::vector<std::string>>();
    v.doc_freq = j.at("doc_freq").get<std::vector<std::size_t>>();
    v.n_docs = j.at("n_docs").get<std::size_t>();
    const std::string sel = j.at("selection").get<std::string>();
    if (sel == "frequency")
        v.selection = Selection::Frequency;
    else if (sel == "chi_tfidf")
        v.selection = Selection::ChiTfidf;
    else
        throw ValidationError("vocabulary: unknown selection " + sel);
    if (v.terms.size() != v.doc_freq.size())
        throw ValidationError("vocabulary: terms/doc_freq size mismatch");
    v.rebuild_index();
    return v;
}

}  // namespace hqa::textfeat
