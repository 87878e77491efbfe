#pragma once

// Hand-crafted feature blocks: 14 surface statistics over the answer text
// and the QA pair, and 26 social statistics from the answering physician's
// profile. Ratio features define 0/0 as 0 so every vector is total.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hqa/corpus.hpp"
#include "hqa/textfeat.hpp"
#include "hqa/util.hpp"

namespace hqa::handfeat {

using corpus::Corpus;
using corpus::PhysicianProfile;
using corpus::QaPair;
using textfeat::TokenizerConfig;

struct Lexicons {
    std::unordered_set<std::string> stopwords;
    std::unordered_set<std::string> domain_words;
    std::unordered_set<std::string> keywords;  // defaults to the domain lexicon
};

inline std::unordered_set<std::string> load_lexicon(const std::filesystem::path& path) {
    std::unordered_set<std::string> out;
    for (const auto& line : split_lines(read_text_file(path)))
        if (!line.empty()) out.insert(line);
    return out;
}

struct SurfaceFeatures {
    std::array<double, 14> values{};  // slf1..slf14 at indices 0..13

    double& slf(int i) { return values[static_cast<std::size_t>(i - 1)]; }
    double slf(int i) const { return values[static_cast<std::size_t>(i - 1)]; }
};

struct SocialFeatures {
    std::array<double, 26> values{};  // sf1..sf26 at indices 0..25
    std::array<bool, 26> missing{};

    double& sf(int i) { return values[static_cast<std::size_t>(i - 1)]; }
    double sf(int i) const { return values[static_cast<std::size_t>(i - 1)]; }
};

inline const std::array<const char*, 14>& surface_feature_names() {
    static const std::array<const char*, 14> names = {
        "slf1", "slf2", "slf3", "slf4", "slf5", "slf6", "slf7",
        "slf8", "slf9", "slf10", "slf11", "slf12", "slf13", "slf14"};
    return names;
}

inline const std::array<const char*, 26>& social_feature_names() {
    static const std::array<const char*, 26> names = {
        "sf1",  "sf2",  "sf3",  "sf4",  "sf5",  "sf6",  "sf7",  "sf8",  "sf9",
        "sf10", "sf11", "sf12", "sf13", "sf14", "sf15", "sf16", "sf17", "sf18",
        "sf19", "sf20", "sf21", "sf22", "sf23", "sf24", "sf25", "sf26"};
    return names;
}

namespace detail {

inline double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

// Sentences end at terminal punctuation; text without any terminator counts
// as a single sentence so average length stays defined.
inline std::size_t sentence_count(std::string_view text) {
    static const std::unordered_set<char32_t> kTerminals = {U'。', U'！', U'？', '.', '!', '?'};
    std::size_t n = 0;
    bool in_sentence = false;
    for (char32_t cp : decode_utf8(text)) {
        if (kTerminals.count(cp)) {
            if (in_sentence) ++n;
            in_sentence = false;
        } else {
            in_sentence = true;
        }
    }
    if (in_sentence) ++n;
    return n == 0 ? 1 : n;
}

inline std::size_t count_keyword_chars(const std::vector<std::string>& tokens,
                                       const std::unordered_set<std::string>& keywords) {
    std::size_t chars = 0;
    for (const auto& t : tokens)
        if (keywords.count(t)) chars += count_codepoints(t);
    return chars;
}

inline std::map<std::string, std::size_t> term_counts(const std::vector<std::string>& tokens) {
    std::map<std::string, std::size_t> m;
    for (const auto& t : tokens) m[t]++;
    return m;
}

inline std::size_t shared_types(const std::map<std::string, std::size_t>& a,
                                const std::map<std::string, std::size_t>& b) {
    std::size_t n = 0;
    for (const auto& [t, c] : a) {
        (void)c;
        if (b.count(t)) ++n;
    }
    return n;
}

inline double cosine(const std::map<std::string, std::size_t>& a,
                     const std::map<std::string, std::size_t>& b) {
    double dot = 0, na = 0, nb = 0;
    for (const auto& [t, c] : a) {
        na += static_cast<double>(c) * static_cast<double>(c);
        auto it = b.find(t);
        if (it != b.end()) dot += static_cast<double>(c) * static_cast<double>(it->second);
    }
    for (const auto& [t, c] : b) nb += static_cast<double>(c) * static_cast<double>(c);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace detail

// slf1  answer length in characters        slf8  average sentence length
// slf2  answer tokens                      slf9  domain words in answer
// slf3  answer tokens minus stopwords      slf10 question/answer char ratio
// slf4  distinct tokens after stopwords    slf11 same, after stopword removal
// slf5  characters per kept token          slf12 shared QA token types
// slf6  keyword character density          slf13 same, after stopword removal
// slf7  sentences                          slf14 QA term-frequency cosine
struct SurfaceContext {
    const Lexicons* lex;
    TokenizerConfig keep_stop;
    TokenizerConfig drop_stop;
};

inline SurfaceContext make_surface_context(const Lexicons& lex, const TokenizerConfig& cfg) {
    SurfaceContext ctx;
    ctx.lex = &lex;
    ctx.keep_stop = cfg.without_stopwords();
    ctx.drop_stop = ctx.keep_stop;
    ctx.drop_stop.stopwords =
        std::make_shared<const std::unordered_set<std::string>>(lex.stopwords);
    return ctx;
}

inline SurfaceFeatures surface_features(const QaPair& qa, const SurfaceContext& ctx) {
    SurfaceFeatures f;
    const Lexicons& lex = *ctx.lex;
    const auto a_tokens = textfeat::tokenize(qa.answer_text, ctx.keep_stop);
    const auto a_kept = textfeat::tokenize(qa.answer_text, ctx.drop_stop);
    const auto q_tokens = textfeat::tokenize(qa.question_text, ctx.keep_stop);
    const auto q_kept = textfeat::tokenize(qa.question_text, ctx.drop_stop);

    const double a_chars = static_cast<double>(count_codepoints(qa.answer_text));
    const double q_chars = static_cast<double>(count_codepoints(qa.question_text));

    f.slf(1) = a_chars;
    f.slf(2) = static_cast<double>(a_tokens.size());
    f.slf(3) = static_cast<double>(a_kept.size());
    std::unordered_set<std::string> distinct(a_kept.begin(), a_kept.end());
    f.slf(4) = static_cast<double>(distinct.size());
    f.slf(5) = detail::ratio(a_chars, f.slf(3));
    f.slf(6) = detail::ratio(
        static_cast<double>(detail::count_keyword_chars(a_tokens, lex.keywords)), a_chars);
    f.slf(7) = static_cast<double>(detail::sentence_count(qa.answer_text));
    f.slf(8) = detail::ratio(f.slf(1), f.slf(7));
    double domain_hits = 0;
    for (const auto& t : a_tokens) domain_hits += lex.domain_words.count(t) ? 1.0 : 0.0;
    f.slf(9) = domain_hits;
    f.slf(10) = detail::ratio(q_chars, f.slf(1));
    double q_kept_chars = 0;
    for (const auto& t : q_kept) q_kept_chars += static_cast<double>(count_codepoints(t));
    double a_kept_chars = 0;
    for (const auto& t : a_kept) a_kept_chars += static_cast<double>(count_codepoints(t));
    f.slf(11) = detail::ratio(q_kept_chars, a_kept_chars);
    const auto q_counts = detail::term_counts(q_tokens);
    const auto a_counts = detail::term_counts(a_tokens);
    f.slf(12) = static_cast<double>(detail::shared_types(q_counts, a_counts));
    const auto qk_counts = detail::term_counts(q_kept);
    const auto ak_counts = detail::term_counts(a_kept);
    f.slf(13) = static_cast<double>(detail::shared_types(qk_counts, ak_counts));
    f.slf(14) = detail::cosine(qk_counts, ak_counts);
    return f;
}

inline SurfaceFeatures surface_features(const QaPair& qa, const Lexicons& lex,
                                        const TokenizerConfig& cfg) {
    return surface_features(qa, make_surface_context(lex, cfg));
}

// sf1 comes from the pair itself; sf2..sf26 from the profile. A missing
// attribute contributes value 0 with its mask bit set, keeping the social
// block at exactly 26 dimensions; an absent profile masks the whole block.
inline SocialFeatures social_features(const PhysicianProfile* prof, const QaPair& qa,
                                      std::int64_t collection_time, std::int64_t launch_time) {
    SocialFeatures f;
    if (qa.answer_time < qa.question_time)
        throw ValidationError("answer_time precedes question_time: " + qa.id);
    if (!prof) {
        f.missing.fill(true);
        return f;
    }
    f.sf(1) = static_cast<double>(qa.answer_time - qa.question_time);
    const auto& specs = corpus::profile_attributes();
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const int sf_i = specs[k].sf_index;
        if (!prof->values[k]) {
            f.missing[static_cast<std::size_t>(sf_i - 1)] = true;
            continue;
        }
        const double raw = *prof->values[k];
        double value = raw;
        if (specs[k].kind == corpus::AttrKind::Timestamp) {
            // sf17 measures recency of activity, sf18 seniority on the site.
            value = sf_i == 17 ? static_cast<double>(collection_time) - raw
                               : raw - static_cast<double>(launch_time);
        }
        f.sf(sf_i) = value;
    }
    return f;
}

// ---------------------------------------------------------------------------
// Normalization and fusion

struct Normalizer {
    std::vector<double> mean;
    std::vector<double> stddev;  // population convention; 0 marks a constant column
};

inline Normalizer fit_normalizer(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw ValidationError("fit_normalizer: empty matrix");
    const std::size_t dim = rows[0].size();
    Normalizer n;
    n.mean.assign(dim, 0.0);
    n.stddev.assign(dim, 0.0);
    for (const auto& r : rows) {
        if (r.size() != dim) throw ValidationError("fit_normalizer: ragged matrix");
        for (std::size_t j = 0; j < dim; ++j) n.mean[j] += r[j];
    }
    for (double& m : n.mean) m /= static_cast<double>(rows.size());
    for (const auto& r : rows)
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = r[j] - n.mean[j];
            n.stddev[j] += d * d;
        }
    for (double& s : n.stddev) s = std::sqrt(s / static_cast<double>(rows.size()));
    return n;
}

// Columns with zero training variance map to 0 rather than blowing up.
inline void apply_normalizer(const Normalizer& n, std::vector<std::vector<double>>& rows) {
    for (auto& r : rows) {
        if (r.size() != n.mean.size()) throw ValidationError("apply_normalizer: dim mismatch");
        for (std::size_t j = 0; j < r.size(); ++j)
            r[j] = n.stddev[j] > 0.0 ? (r[j] - n.mean[j]) / n.stddev[j] : 0.0;
    }
}

struct BlockMask {
    bool textual = true;
    bool slf = false;
    bool sf = false;

    std::string name() const {
        std::string s = textual ? "textual" : "";
        if (slf) s += s.empty() ? "slf" : "+slf";
        if (sf) s += s.empty() ? "sf" : "+sf";
        return s.empty() ? "none" : s;
    }
};

struct UnifiedVector {
    std::vector<double> values;
    // Spans into `values` in the fixed order textual, slf, sf.
    std::size_t textual_len = 0;
    std::size_t slf_len = 0;
    std::size_t sf_len = 0;
};

inline UnifiedVector unify(const std::vector<double>& textual, const SurfaceFeatures& slf,
                           const SocialFeatures& sf, const BlockMask& mask) {
    UnifiedVector u;
    if (mask.textual) {
        u.values.insert(u.values.end(), textual.begin(), textual.end());
        u.textual_len = textual.size();
    }
    if (mask.slf) {
        u.values.insert(u.values.end(), slf.values.begin(), slf.values.end());
        u.slf_len = slf.values.size();
    }
    if (mask.sf) {
        u.values.insert(u.values.end(), sf.values.begin(), sf.values.end());
        u.sf_len = sf.values.size();
    }
    return u;
}

// CSV export of the hand-crafted blocks, one row per pair, columns named
// slf1..slf14, sf1..sf26.
inline std::string features_to_csv(const std::vector<SurfaceFeatures>& slf,
                                   const std::vector<SocialFeatures>& sf,
                                   const std::vector<std::string>& ids) {
    if (slf.size() != sf.size() || slf.size() != ids.size())
        throw ValidationError("features_to_csv: row count mismatch");
    std::string out = "id";
    for (const auto* n : surface_feature_names()) out += std::string(",") + n;
    for (const auto* n : social_feature_names()) out += std::string(",") + n;
    out += '\n';
    for (std::size_t r = 0; r < slf.size(); ++r) {
        out += ids[r];
        for (double v : slf[r].values) out += "," + fmt_double(v, 6);
        for (double v : sf[r].values) out += "," + fmt_double(v, 6);
        out += '\n';
    }
    return out;
}

}  // namespace hqa::handfeat
