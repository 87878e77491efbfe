#pragma once

// Labeled QA corpora: loading and validation, the minimum-length filter,
// balanced subsampling, stratified fold plans, and a seeded synthetic
// generator with tunable label signals for end-to-end checks.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "hqa/rng.hpp"
#include "hqa/util.hpp"

namespace hqa::corpus {

using json = nlohmann::json;

enum class Label { High, Low };

inline std::string label_name(Label l) { return l == Label::High ? "high" : "low"; }

inline Label parse_label(const std::string& s) {
    if (s == "high") return Label::High;
    if (s == "low") return Label::Low;
    throw ValidationError("unknown label: " + s);
}

struct QaPair {
    std::string id;
    std::string question_text;
    std::string answer_text;
    std::optional<Label> label;  // absent only in scoring inputs
    std::string physician_id;
    std::int64_t question_time = 0;
    std::int64_t answer_time = 0;
};

// Profile attributes are registered by name so the JSONL reader, the
// validator, and the social-feature block all agree on one catalogue.
enum class AttrKind { Count, Fraction, Ordinal, Timestamp, Boolean };

struct AttrSpec {
    const char* key;
    AttrKind kind;
    int sf_index;     // which social feature consumes this attribute
    int ordinal_max;  // inclusive upper bound for Ordinal kind
};

inline const std::array<AttrSpec, 25>& profile_attributes() {
    static const std::array<AttrSpec, 25> specs = {{
        {"service_rating", AttrKind::Fraction, 2, 0},
        {"patient_recommendation", AttrKind::Fraction, 3, 0},
        {"thank_letters", AttrKind::Count, 4, 0},
        {"gift_count", AttrKind::Count, 5, 0},
        {"gift_giver_count", AttrKind::Count, 6, 0},
        {"care_value", AttrKind::Count, 7, 0},
        {"contribution_value", AttrKind::Count, 8, 0},
        {"total_visits", AttrKind::Count, 9, 0},
        {"prev_day_visits", AttrKind::Count, 10, 0},
        {"article_count", AttrKind::Count, 11, 0},
        {"total_patients", AttrKind::Count, 12, 0},
        {"outpatient_registrations", AttrKind::Count, 13, 0},
        {"prev_day_outpatient_registrations", AttrKind::Count, 14, 0},
        {"wechat_registrations", AttrKind::Count, 15, 0},
        {"patient_votes", AttrKind::Count, 16, 0},
        {"last_online_time", AttrKind::Timestamp, 17, 0},
        {"joining_time", AttrKind::Timestamp, 18, 0},
        {"physician_grade", AttrKind::Ordinal, 19, 4},
        {"hospital_grade", AttrKind::Ordinal, 20, 6},
        {"education_grade", AttrKind::Ordinal, 21, 4},
        {"telephone_service", AttrKind::Boolean, 22, 0},
        {"phone_effectiveness_satisfaction", AttrKind::Fraction, 23, 0},
        {"phone_consultation_count", AttrKind::Count, 24, 0},
        {"phone_attitude_satisfaction", AttrKind::Fraction, 25, 0},
        {"qr_communication_count", AttrKind::Count, 26, 0},
    }};
    return specs;
}

struct PhysicianProfile {
    std::string physician_id;
    // Parallel to profile_attributes(); nullopt marks a missing attribute.
    std::array<std::optional<double>, 25> values;

    std::optional<double> get(std::string_view key) const {
        const auto& specs = profile_attributes();
        for (std::size_t i = 0; i < specs.size(); ++i)
            if (key == specs[i].key) return values[i];
        throw ValidationError("unknown profile attribute: " + std::string(key));
    }

    void set(std::string_view key, double v) {
        const auto& specs = profile_attributes();
        for (std::size_t i = 0; i < specs.size(); ++i) {
            if (key == specs[i].key) {
                values[i] = v;
                return;
            }
        }
        throw ValidationError("unknown profile attribute: " + std::string(key));
    }
};

struct CorpusMeta {
    std::string source;
    // Reference times for the activity and seniority features. When a file
    // does not provide them they are derived: collection_time falls back to
    // the latest answer_time, launch_time to the earliest joining_time.
    std::optional<std::int64_t> collection_time;
    std::optional<std::int64_t> launch_time;
};

struct Corpus {
    std::vector<QaPair> pairs;
    std::map<std::string, PhysicianProfile> profiles;
    CorpusMeta meta;

    const PhysicianProfile* profile_for(const QaPair& qa) const {
        auto it = profiles.find(qa.physician_id);
        return it == profiles.end() ? nullptr : &it->second;
    }

    std::int64_t effective_collection_time() const {
        if (meta.collection_time) return *meta.collection_time;
        std::int64_t t = 0;
        for (const auto& p : pairs) t = std::max(t, p.answer_time);
        return t;
    }

    std::int64_t effective_launch_time() const {
        if (meta.launch_time) return *meta.launch_time;
        constexpr std::size_t kJoining = 16;  // index of joining_time in the catalogue
        std::optional<std::int64_t> t;
        for (const auto& [id, prof] : profiles) {
            (void)id;
            if (prof.values[kJoining])
                t = t ? std::min(*t, static_cast<std::int64_t>(*prof.values[kJoining]))
                      : static_cast<std::int64_t>(*prof.values[kJoining]);
        }
        return t.value_or(0);
    }

    std::size_t count_label(Label l) const {
        std::size_t n = 0;
        for (const auto& p : pairs) n += (p.label == l);
        return n;
    }
};

struct Reject {
    std::size_t line_no = 0;  // 1-based line in the source file
    std::string reason;
};

struct LoadResult {
    Corpus corpus;
    std::vector<Reject> rejects;
};

// ---------------------------------------------------------------------------
// JSONL IO

namespace detail {

inline bool get_string(const json& j, const char* key, std::string& out, std::string& err) {
    auto it = j.find(key);
    if (it == j.end()) {
        err = std::string("missing field: ") + key;
        return false;
    }
    if (!it->is_string()) {
        err = std::string("field not a string: ") + key;
        return false;
    }
    out = it->get<std::string>();
    return true;
}

inline bool get_int(const json& j, const char* key, std::int64_t& out, std::string& err) {
    auto it = j.find(key);
    if (it == j.end()) {
        err = std::string("missing field: ") + key;
        return false;
    }
    if (!it->is_number_integer()) {
        err = std::string("field not an integer: ") + key;
        return false;
    }
    out = it->get<std::int64_t>();
    return true;
}

}  // namespace detail

// Parses a QA JSONL file. Malformed lines land in the rejects list with
// their line number; they are never silently dropped. With
// `require_labels` false (scoring inputs) the label key may be absent.
inline LoadResult load_corpus(const std::filesystem::path& path, bool require_labels = true) {
    LoadResult result;
    result.corpus.meta.source = path.string();
    const std::string text = read_text_file(path);
    const auto lines = split_lines(text);
    std::unordered_set<std::string> seen_ids;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const std::string& line = lines[i];
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            result.rejects.push_back({line_no, "not a JSON object"});
            continue;
        }
        QaPair qa;
        std::string err;
        if (!detail::get_string(j, "id", qa.id, err) ||
            !detail::get_string(j, "question", qa.question_text, err) ||
            !detail::get_string(j, "answer", qa.answer_text, err) ||
            !detail::get_string(j, "physician_id", qa.physician_id, err) ||
            !detail::get_int(j, "question_time", qa.question_time, err) ||
            !detail::get_int(j, "answer_time", qa.answer_time, err)) {
            result.rejects.push_back({line_no, err});
            continue;
        }
        if (auto it = j.find("label"); it != j.end()) {
            if (!it->is_string()) {
                result.rejects.push_back({line_no, "field not a string: label"});
                continue;
            }
            const std::string s = it->get<std::string>();
            if (s != "high" && s != "low") {
                result.rejects.push_back({line_no, "unknown label: " + s});
                continue;
            }
            qa.label = parse_label(s);
        } else if (require_labels) {
            result.rejects.push_back({line_no, "missing field: label"});
            continue;
        }
        if (qa.answer_time < qa.question_time) {
            result.rejects.push_back({line_no, "answer_time precedes question_time"});
            continue;
        }
        if (!seen_ids.insert(qa.id).second) {
            result.rejects.push_back({line_no, "duplicate id: " + qa.id});
            continue;
        }
        result.corpus.pairs.push_back(std::move(qa));
    }
    return result;
}

// Profile JSONL: one object per line keyed by physician_id; every other key
// must belong to the attribute catalogue and satisfy its kind constraints.
inline void load_profiles(const std::filesystem::path& path, Corpus& corpus,
                          std::vector<Reject>* rejects = nullptr) {
    const std::string text = read_text_file(path);
    const auto lines = split_lines(text);
    const auto& specs = profile_attributes();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const std::string& line = lines[i];
        if (line.empty()) continue;
        const auto fail = [&](const std::string& why) {
            if (rejects)
                rejects->push_back({line_no, why});
            else
                throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + why);
        };
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            fail("not a JSON object");
            continue;
        }
        PhysicianProfile prof;
        std::string err;
        if (!detail::get_string(j, "physician_id", prof.physician_id, err)) {
            fail(err);
            continue;
        }
        bool ok = true;
        for (auto it = j.begin(); it != j.end() && ok; ++it) {
            if (it.key() == "physician_id") continue;
            const AttrSpec* spec = nullptr;
            std::size_t idx = 0;
            for (std::size_t k = 0; k < specs.size(); ++k) {
                if (it.key() == specs[k].key) {
                    spec = &specs[k];
                    idx = k;
                    break;
                }
            }
            if (!spec) {
                fail("unknown profile attribute: " + it.key());
                ok = false;
                break;
            }
            double v = 0;
            switch (spec->kind) {
                case AttrKind::Boolean:
                    if (!it->is_boolean()) {
                        fail(it.key() + ": expected boolean");
                        ok = false;
                        continue;
                    }
                    v = it->get<bool>() ? 1.0 : 0.0;
                    break;
                case AttrKind::Count:
                case AttrKind::Ordinal:
                case AttrKind::Timestamp:
                    if (!it->is_number_integer()) {
                        fail(it.key() + ": expected integer");
                        ok = false;
                        continue;
                    }
                    v = static_cast<double>(it->get<std::int64_t>());
                    break;
                case AttrKind::Fraction:
                    if (!it->is_number()) {
                        fail(it.key() + ": expected number");
                        ok = false;
                        continue;
                    }
                    v = it->get<double>();
                    break;
            }
            if (spec->kind == AttrKind::Count && v < 0) {
                fail(it.key() + ": negative count");
                ok = false;
                continue;
            }
            if (spec->kind == AttrKind::Fraction && (v < 0.0 || v > 1.0)) {
                fail(it.key() + ": fraction outside [0,1]");
                ok = false;
                continue;
            }
            if (spec->kind == AttrKind::Ordinal && (v < 0 || v > spec->ordinal_max)) {
                fail(it.key() + ": ordinal outside [0," + std::to_string(spec->ordinal_max) + "]");
                ok = false;
                continue;
            }
            prof.values[idx] = v;
        }
        if (!ok) continue;
        corpus.profiles[prof.physician_id] = std::move(prof);
    }
}

inline json qa_to_json(const QaPair& qa) {
    json j;
    j["id"] = qa.id;
    j["question"] = qa.question_text;
    j["answer"] = qa.answer_text;
    if (qa.label) j["label"] = label_name(*qa.label);
    j["physician_id"] = qa.physician_id;
    j["question_time"] = qa.question_time;
    j["answer_time"] = qa.answer_time;
    return j;
}

inline std::string corpus_to_jsonl(const Corpus& c) {
    std::string out;
    for (const auto& qa : c.pairs) {
        out += qa_to_json(qa).dump();
        out += '\n';
    }
    return out;
}

inline std::string profiles_to_jsonl(const Corpus& c) {
    const auto& specs = profile_attributes();
    std::string out;
    for (const auto& [id, prof] : c.profiles) {
        json j;
        j["physician_id"] = id;
        for (std::size_t k = 0; k < specs.size(); ++k) {
            if (!prof.values[k]) continue;
            const double v = *prof.values[k];
            switch (specs[k].kind) {
                case AttrKind::Boolean:
                    j[specs[k].key] = v != 0.0;
                    break;
                case AttrKind::Fraction:
                    j[specs[k].key] = v;
                    break;
                default:
                    j[specs[k].key] = static_cast<std::int64_t>(v);
                    break;
            }
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Protocol operations

inline Corpus filter_min_answer_length(const Corpus& c, std::size_t min_chars) {
    Corpus out;
    out.meta = c.meta;
    out.profiles = c.profiles;
    for (const auto& qa : c.pairs)
        if (count_codepoints(qa.answer_text) >= min_chars) out.pairs.push_back(qa);
    return out;
}

inline void require_labels(const Corpus& c) {
    for (const auto& qa : c.pairs)
        if (!qa.label) throw ValidationError("unlabeled record: " + qa.id);
}

// Samples exactly n_per_class pairs per class without replacement.
inline Corpus balanced_sample(const Corpus& c, std::size_t n_per_class, std::uint64_t seed) {
    require_labels(c);
    std::vector<std::size_t> high, low;
    for (std::size_t i = 0; i < c.pairs.size(); ++i)
        (c.pairs[i].label == Label::High ? high : low).push_back(i);
    if (high.size() < n_per_class)
        throw ValidationError("balanced_sample: class high has " + std::to_string(high.size()) +
                              " members, need " + std::to_string(n_per_class));
    if (low.size() < n_per_class)
        throw ValidationError("balanced_sample: class low has " + std::to_string(low.size()) +
                              " members, need " + std::to_string(n_per_class));
    Rng rng(derive_seed(seed, "balanced_sample"));
    rng.shuffle(high);
    rng.shuffle(low);
    high.resize(n_per_class);
    low.resize(n_per_class);
    std::vector<std::size_t> keep;
    keep.reserve(2 * n_per_class);
    keep.insert(keep.end(), high.begin(), high.end());
    keep.insert(keep.end(), low.begin(), low.end());
    std::sort(keep.begin(), keep.end());  // preserve corpus order
    Corpus out;
    out.meta = c.meta;
    out.profiles = c.profiles;
    for (std::size_t i : keep) out.pairs.push_back(c.pairs[i]);
    return out;
}

struct FoldPlan {
    std::size_t k = 0;
    std::map<std::string, std::size_t> assignments;  // id -> fold
    std::uint64_t seed = 0;
};

// Stratified folds: each class is shuffled and dealt round-robin, with the
// deal offset chained across classes so overall fold sizes also stay within
// one of each other.
inline FoldPlan make_folds(const Corpus& c, std::size_t k, std::uint64_t seed) {
    require_labels(c);
    if (k < 2) throw ValidationError("make_folds: k must be at least 2");
    std::vector<std::size_t> high, low;
    for (std::size_t i = 0; i < c.pairs.size(); ++i)
        (c.pairs[i].label == Label::High ? high : low).push_back(i);
    if (high.size() < k || low.size() < k)
        throw ValidationError("make_folds: k=" + std::to_string(k) +
                              " exceeds smallest class size " +
                              std::to_string(std::min(high.size(), low.size())));
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    Rng rng(derive_seed(seed, "folds"));
    std::size_t offset = 0;
    for (auto* cls : {&high, &low}) {
        rng.shuffle(*cls);
        for (std::size_t i = 0; i < cls->size(); ++i)
            plan.assignments[c.pairs[(*cls)[i]].id] = (offset + i) % k;
        offset = (offset + cls->size()) % k;
    }
    return plan;
}

inline std::pair<Corpus, Corpus> split_fold(const Corpus& c, const FoldPlan& plan,
                                            std::size_t fold) {
    Corpus train, test;
    train.meta = test.meta = c.meta;
    train.profiles = test.profiles = c.profiles;
    for (const auto& qa : c.pairs) {
        auto it = plan.assignments.find(qa.id);
        if (it == plan.assignments.end())
            throw RuntimeFailure("fold plan missing id: " + qa.id);
        (it->second == fold ? test : train).pairs.push_back(qa);
    }
    return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------------------
// Synthetic corpora

// All signal strengths live in [0,1]; at 0 the generator is label blind, so
// any downstream classifier should score chance-level. Lexicon sizes shape
// the vocabulary the featurizers see.
struct SynthSpec {
    std::size_t n_high = 890;
    std::size_t n_low = 110;
    std::size_t general_vocab = 150;
    std::size_t domain_vocab = 60;
    std::size_t promo_vocab = 25;
    double overlap_signal = 0.7;  // high answers copy question tokens
    double domain_signal = 0.7;   // high answers favor domain words, low favor promo words
    double length_signal = 0.7;   // low answers get extreme lengths
    double gap_signal = 0.7;      // low answers get near-zero response gaps
    double profile_signal = 0.7;  // label-conditioned patient and visit counts
    double profile_missing_rate = 0.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

inline SynthSpec parse_synth_spec(const json& j) {
    SynthSpec s;
    const auto geti = [&](const char* key, std::size_t& out) {
        if (auto it = j.find(key); it != j.end()) {
            if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
                throw ValidationError(std::string("synth spec: ") + key +
                                      " must be a non-negative integer");
            out = static_cast<std::size_t>(it->get<std::int64_t>());
        }
    };
    const auto getp = [&](const char* key, double& out) {
        if (auto it = j.find(key); it != j.end()) {
            if (!it->is_number()) throw ValidationError(std::string("synth spec: ") + key);
            out = it->get<double>();
            if (out < 0.0 || out > 1.0)
                throw ValidationError(std::string("synth spec: ") + key + " outside [0,1]");
        }
    };
    if (!j.is_object()) throw ValidationError("synth spec: not a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const std::set<std::string> known = {
            "n_high",         "n_low",         "general_vocab", "domain_vocab",
            "promo_vocab",    "overlap_signal", "domain_signal", "length_signal",
            "gap_signal",     "profile_signal", "profile_missing_rate", "seed"};
        if (!known.count(it.key()))
            throw ValidationError("synth spec: unknown field " + it.key());
    }
    geti("n_high", s.n_high);
    geti("n_low", s.n_low);
    geti("general_vocab", s.general_vocab);
    geti("domain_vocab", s.domain_vocab);
    geti("promo_vocab", s.promo_vocab);
    getp("overlap_signal", s.overlap_signal);
    getp("domain_signal", s.domain_signal);
    getp("length_signal", s.length_signal);
    getp("gap_signal", s.gap_signal);
    getp("profile_signal", s.profile_signal);
    getp("profile_missing_rate", s.profile_missing_rate);
    if (auto it = j.find("seed"); it != j.end()) {
        if (!it->is_number_integer()) throw ValidationError("synth spec: seed must be integer");
        s.seed = it->get<std::uint64_t>();
        s.seed_set = true;
    }
    return s;
}

struct SynthResult {
    Corpus corpus;
    std::vector<std::string> domain_words;
    std::vector<std::string> promo_words;
    std::vector<std::string> stopwords;
};

namespace detail {

inline std::vector<std::string> make_lexicon(const char* prefix, std::size_t n) {
    std::vector<std::string> words;
    words.reserve(n);
    for (std::size_t i = 0; i < n; ++i) words.push_back(prefix + std::to_string(i));
    return words;
}

}  // namespace detail

inline SynthResult generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
    if (spec.n_high + spec.n_low > 0 &&
        (spec.general_vocab == 0 || spec.domain_vocab == 0 || spec.promo_vocab == 0))
        throw ValidationError("synth spec: lexicon sizes must be positive");
    SynthResult result;
    result.domain_words = detail::make_lexicon("med", spec.domain_vocab);
    result.promo_words = detail::make_lexicon("promo", spec.promo_vocab);
    result.stopwords = {"the", "and", "of", "to", "a", "in", "is", "for", "with", "on"};
    const auto general = detail::make_lexicon("gen", spec.general_vocab);

    Corpus& c = result.corpus;
    c.meta.source = "synthetic";
    constexpr std::int64_t kEpochBase = 1451606400;  // 2016-01-01T00:00:00Z
    constexpr std::int64_t kYear = 365LL * 24 * 3600;
    const std::int64_t launch_time = kEpochBase - 6 * kYear;
    const std::int64_t collection_time = kEpochBase + kYear + 30 * 24 * 3600;
    c.meta.launch_time = launch_time;
    c.meta.collection_time = collection_time;

    Rng rng(derive_seed(seed, "synth"));

    const auto draw_word = [&](const std::vector<std::string>& lex) -> const std::string& {
        return lex[rng.below(lex.size())];
    };

    // Question: a handful of general plus domain tokens with light stopwords.
    const auto make_question = [&]() {
        std::vector<std::string> toks;
        const std::size_t n = static_cast<std::size_t>(rng.uniform_int(6, 12));
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.bernoulli(0.12)) toks.push_back(result.stopwords[rng.below(result.stopwords.size())]);
            toks.push_back(rng.bernoulli(0.5) ? draw_word(general) : draw_word(result.domain_words));
        }
        return toks;
    };

    const std::size_t n_total = spec.n_high + spec.n_low;
    std::vector<Label> labels(n_total);
    for (std::size_t i = 0; i < n_total; ++i) labels[i] = i < spec.n_high ? Label::High : Label::Low;
    rng.shuffle(labels);

    for (std::size_t idx = 0; idx < n_total; ++idx) {
        const Label label = labels[idx];
        const bool is_high = label == Label::High;
        QaPair qa;
        qa.id = "q" + std::to_string(idx);
        qa.physician_id = "p" + std::to_string(idx);
        qa.label = label;

        const auto q_tokens = make_question();

        // Answer length in tokens: shared bell curve, except low answers are
        // pulled to a short-or-long extreme with probability length_signal.
        std::size_t n_tokens;
        if (!is_high && rng.bernoulli(spec.length_signal)) {
            n_tokens = rng.bernoulli(0.5)
                           ? static_cast<std::size_t>(std::max(3.0, rng.normal(6.0, 2.0)))
                           : static_cast<std::size_t>(std::max(3.0, rng.normal(85.0, 10.0)));
        } else {
            n_tokens = static_cast<std::size_t>(std::max(3.0, rng.normal(30.0, 6.0)));
        }

        // Token mix. High answers copy question tokens (overlap) and lean on
        // domain words; low answers lean on the promo lexicon instead.
        const double p_copy = is_high ? 0.35 * spec.overlap_signal : 0.05 * spec.overlap_signal;
        const double p_domain = is_high ? 0.15 + 0.30 * spec.domain_signal : 0.15;
        const double p_promo = is_high ? 0.02 : 0.02 + 0.45 * spec.domain_signal;
        std::vector<std::string> a_tokens;
        a_tokens.reserve(n_tokens + n_tokens / 8);
        for (std::size_t i = 0; i < n_tokens; ++i) {
            if (rng.bernoulli(0.10)) a_tokens.push_back(result.stopwords[rng.below(result.stopwords.size())]);
            const double u = rng.uniform01();
            if (u < p_copy) {
                a_tokens.push_back(q_tokens[rng.below(q_tokens.size())]);
            } else if (u < p_copy + p_domain) {
                a_tokens.push_back(draw_word(result.domain_words));
            } else if (u < p_copy + p_domain + p_promo) {
                a_tokens.push_back(draw_word(result.promo_words));
            } else {
                a_tokens.push_back(draw_word(general));
            }
        }
        qa.question_text = join(q_tokens, " ") + ".";
        qa.answer_text = join(a_tokens, " ") + ".";

        qa.question_time = kEpochBase + rng.uniform_int(0, kYear);
        std::int64_t gap;
        if (!is_high && rng.bernoulli(spec.gap_signal)) {
            gap = rng.uniform_int(5, 60);  // template-style instant reply
        } else {
            gap = 600 + static_cast<std::int64_t>(rng.exponential(3600.0));
        }
        qa.answer_time = qa.question_time + gap;

        // Profile: patient and visit counts carry the label signal; the rest
        // is label-blind filler so only the planted attributes rank high.
        PhysicianProfile prof;
        prof.physician_id = qa.physician_id;
        const double lift = spec.profile_signal * (is_high ? 1.0 : -1.0);
        const double patients = std::exp(rng.normal(5.5 + 1.2 * lift, 0.5));
        const double visits = patients * rng.uniform(20.0, 60.0);
        prof.set("total_patients", std::floor(patients));
        prof.set("total_visits", std::floor(visits));
        prof.set("contribution_value", std::floor(std::exp(rng.normal(4.0 + 0.8 * lift, 0.6))));
        prof.set("care_value", std::floor(std::exp(rng.normal(3.5 + 0.6 * lift, 0.6))));
        prof.set("article_count", std::floor(rng.exponential(8.0)));
        prof.set("prev_day_visits", std::floor(rng.exponential(40.0)));
        prof.set("thank_letters", std::floor(rng.exponential(12.0)));
        prof.set("gift_count", std::floor(rng.exponential(9.0)));
        prof.set("gift_giver_count", std::floor(rng.exponential(6.0)));
        prof.set("outpatient_registrations", std::floor(rng.exponential(15.0)));
        prof.set("prev_day_outpatient_registrations", std::floor(rng.exponential(2.0)));
        prof.set("wechat_registrations", std::floor(rng.exponential(4.0)));
        prof.set("patient_votes", std::floor(rng.exponential(25.0)));
        prof.set("service_rating", rng.uniform(0.55, 1.0));
        prof.set("patient_recommendation", rng.uniform(0.3, 1.0));
        prof.set("phone_effectiveness_satisfaction", rng.uniform(0.4, 1.0));
        prof.set("phone_attitude_satisfaction", rng.uniform(0.4, 1.0));
        prof.set("phone_consultation_count", std::floor(rng.exponential(5.0)));
        prof.set("qr_communication_count", std::floor(rng.exponential(7.0)));
        prof.set("telephone_service", rng.bernoulli(0.5) ? 1.0 : 0.0);
        prof.set("physician_grade", static_cast<double>(rng.uniform_int(0, 4)));
        prof.set("hospital_grade", static_cast<double>(rng.uniform_int(0, 6)));
        prof.set("education_grade", static_cast<double>(rng.uniform_int(0, 4)));
        // Activity stays label-blind on purpose: it should rank below the
        // planted attributes in the feature-weight report.
        prof.set("last_online_time",
                 static_cast<double>(collection_time -
                                     static_cast<std::int64_t>(rng.exponential(2.0 * 24 * 3600))));
        prof.set("joining_time",
                 static_cast<double>(launch_time + rng.uniform_int(0, 5 * kYear)));
        if (spec.profile_missing_rate > 0.0) {
            for (auto& v : prof.values)
                if (rng.bernoulli(spec.profile_missing_rate)) v.reset();
        }

        c.profiles[prof.physician_id] = std::move(prof);
        c.pairs.push_back(std::move(qa));
    }
    return result;
}

}  // namespace hqa::corpus
