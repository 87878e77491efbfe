#pragma once

// End-to-end orchestration: a fully defaulted run configuration, per-fold
// featurizer fitting (training split only, never test), repeated stratified
// cross-validation, the 4x4 feature-combination grid with paired t-tests,
// chi-squared ranking of the hand-crafted blocks, and persistable run
// artifacts for train/predict. Every stage draws from seeds derived as
// mix(master, purpose, trial, fold) so reports replay byte for byte.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "hqa/beliefnet.hpp"
#include "hqa/corpus.hpp"
#include "hqa/handfeat.hpp"
#include "hqa/learner.hpp"
#include "hqa/textfeat.hpp"
#include "hqa/topicmodel.hpp"
#include "hqa/util.hpp"

namespace hqa::pipeline {

using corpus::Corpus;
using corpus::Label;
using json = nlohmann::json;

enum class Featurizer { WordBinary, WordChiTfidf, Topic, Dbn, None };
enum class Classifier { LogReg, Nb };

inline std::string featurizer_name(Featurizer f) {
    switch (f) {
        case Featurizer::WordBinary: return "word_binary";
        case Featurizer::WordChiTfidf: return "word_chi_tfidf";
        case Featurizer::Topic: return "topic";
        case Featurizer::Dbn: return "dbn";
        case Featurizer::None: return "none";
    }
    return "?";
}

inline Featurizer parse_featurizer(const std::string& s) {
    if (s == "word_binary") return Featurizer::WordBinary;
    if (s == "word_chi_tfidf") return Featurizer::WordChiTfidf;
    if (s == "topic") return Featurizer::Topic;
    if (s == "dbn") return Featurizer::Dbn;
    if (s == "none") return Featurizer::None;
    throw ValidationError("unknown featurizer: " + s);
}

struct LdaConfig {
    std::size_t k = 25;
    double alpha = -1.0;  // <= 0 means the 50/K default
    double beta = 0.01;
    std::size_t n_iterations = 1000;
    std::size_t n_infer_iterations = 100;
};

struct PipelineConfig {
    Featurizer featurizer = Featurizer::Dbn;
    bool use_slf = false;
    bool use_sf = false;
    Classifier classifier = Classifier::LogReg;
    std::size_t vocab_size = 1904;
    textfeat::TokenizerMode tokenizer_mode = textfeat::TokenizerMode::UnicodeWords;
    bool lowercase = true;
    std::string stopword_path;
    std::string domain_path;
    std::string keyword_path;  // empty = reuse the domain lexicon
    LdaConfig lda;
    std::vector<std::size_t> dbn_layout = {1904, 1904, 1500, 1000};
    beliefnet::TrainHyper dbn;
    learner::LogRegConfig logreg;
    std::size_t k_folds = 5;
    std::size_t n_trials = 5;
    std::uint64_t seed = 42;
    std::optional<std::int64_t> collection_time;
    std::optional<std::int64_t> launch_time;
};

inline void validate(const PipelineConfig& c) {
    if (c.vocab_size == 0) throw ValidationError("config: vocab_size must be positive");
    if (c.featurizer == Featurizer::Dbn) {
        if (c.dbn_layout.size() < 2) throw ValidationError("config: dbn layout too short");
        if (c.dbn_layout[0] != c.vocab_size)
            throw ValidationError("config: dbn layout[0] must equal vocab_size");
        beliefnet::validate(c.dbn);
    }
    if (c.featurizer == Featurizer::None && !c.use_slf && !c.use_sf)
        throw ValidationError("config: featurizer none requires slf or sf blocks");
    if (c.featurizer == Featurizer::Topic && c.lda.k < 2)
        throw ValidationError("config: lda k must be at least 2");
    if (c.k_folds < 2) throw ValidationError("config: k must be at least 2");
    if (c.n_trials < 1) throw ValidationError("config: trials must be at least 1");
}

// ---------------------------------------------------------------------------
// Config JSON (fully defaulted; unknown keys rejected)

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* key : allowed)
            if (it.key() == key) ok = true;
        if (!ok) throw ValidationError("config: unknown key " + where + it.key());
    }
}

}  // namespace detail

inline PipelineConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("config: not a JSON object");
    detail::check_keys(j,
                       {"featurizer", "non_textual", "classifier", "vocab_size", "tokenizer",
                        "lexicons", "lda", "dbn", "logreg", "protocol", "seed",
                        "collection_time", "launch_time"},
                       "");
    PipelineConfig c;
    if (j.contains("featurizer")) c.featurizer = parse_featurizer(j.at("featurizer"));
    if (j.contains("non_textual")) {
        c.use_slf = c.use_sf = false;
        for (const auto& b : j.at("non_textual")) {
            const std::string s = b.get<std::string>();
            if (s == "slf")
                c.use_slf = true;
            else if (s == "sf")
                c.use_sf = true;
            else
                throw ValidationError("config: unknown non_textual block " + s);
        }
    }
    if (j.contains("classifier")) {
        const std::string s = j.at("classifier");
        if (s == "logreg")
            c.classifier = Classifier::LogReg;
        else if (s == "nb")
            c.classifier = Classifier::Nb;
        else
            throw ValidationError("config: unknown classifier " + s);
    }
    if (j.contains("vocab_size")) c.vocab_size = j.at("vocab_size").get<std::size_t>();
    if (j.contains("tokenizer")) {
        const json& t = j.at("tokenizer");
        detail::check_keys(t, {"mode", "lowercase"}, "tokenizer.");
        if (t.contains("mode")) {
            const std::string m = t.at("mode");
            if (m == "unicode_words")
                c.tokenizer_mode = textfeat::TokenizerMode::UnicodeWords;
            else if (m == "whitespace")
                c.tokenizer_mode = textfeat::TokenizerMode::Whitespace;
            else if (m == "pretokenized")
                c.tokenizer_mode = textfeat::TokenizerMode::Pretokenized;
            else
                throw ValidationError("config: unknown tokenizer mode " + m);
        }
        if (t.contains("lowercase")) c.lowercase = t.at("lowercase").get<bool>();
    }
    if (j.contains("lexicons")) {
        const json& l = j.at("lexicons");
        detail::check_keys(l, {"stopwords", "domain", "keywords"}, "lexicons.");
        const auto path = [&](const char* key) -> std::string {
            if (!l.contains(key) || l.at(key).is_null()) return "";
            return l.at(key).get<std::string>();
        };
        c.stopword_path = path("stopwords");
        c.domain_path = path("domain");
        c.keyword_path = path("keywords");
    }
    if (j.contains("lda")) {
        const json& l = j.at("lda");
        detail::check_keys(l, {"k", "alpha", "beta", "iterations", "infer_iterations"}, "lda.");
        if (l.contains("k")) c.lda.k = l.at("k").get<std::size_t>();
        if (l.contains("alpha") && !l.at("alpha").is_null())
            c.lda.alpha = l.at("alpha").get<double>();
        if (l.contains("beta")) c.lda.beta = l.at("beta").get<double>();
        if (l.contains("iterations")) c.lda.n_iterations = l.at("iterations").get<std::size_t>();
        if (l.contains("infer_iterations"))
            c.lda.n_infer_iterations = l.at("infer_iterations").get<std::size_t>();
    }
    if (j.contains("dbn")) {
        const json& d = j.at("dbn");
        detail::check_keys(d,
                           {"layout", "learning_rate", "weight_cost", "momentum_initial",
                            "momentum_final", "momentum_switch_epoch", "epochs", "batch_size"},
                           "dbn.");
        if (d.contains("layout")) c.dbn_layout = d.at("layout").get<std::vector<std::size_t>>();
        if (d.contains("learning_rate")) c.dbn.learning_rate = d.at("learning_rate").get<double>();
        if (d.contains("weight_cost")) c.dbn.weight_cost = d.at("weight_cost").get<double>();
        if (d.contains("momentum_initial"))
            c.dbn.momentum_initial = d.at("momentum_initial").get<double>();
        if (d.contains("momentum_final"))
            c.dbn.momentum_final = d.at("momentum_final").get<double>();
        if (d.contains("momentum_switch_epoch"))
            c.dbn.momentum_switch_epoch = d.at("momentum_switch_epoch").get<std::size_t>();
        if (d.contains("epochs")) c.dbn.n_epochs = d.at("epochs").get<std::size_t>();
        if (d.contains("batch_size")) c.dbn.batch_size = d.at("batch_size").get<std::size_t>();
    }
    if (j.contains("logreg")) {
        const json& l = j.at("logreg");
        detail::check_keys(l, {"l2", "learning_rate", "iterations"}, "logreg.");
        if (l.contains("l2")) c.logreg.l2 = l.at("l2").get<double>();
        if (l.contains("learning_rate")) c.logreg.learning_rate = l.at("learning_rate").get<double>();
        if (l.contains("iterations")) c.logreg.n_iterations = l.at("iterations").get<std::size_t>();
    }
    if (j.contains("protocol")) {
        const json& p = j.at("protocol");
        detail::check_keys(p, {"k", "trials"}, "protocol.");
        if (p.contains("k")) c.k_folds = p.at("k").get<std::size_t>();
        if (p.contains("trials")) c.n_trials = p.at("trials").get<std::size_t>();
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("collection_time") && !j.at("collection_time").is_null())
        c.collection_time = j.at("collection_time").get<std::int64_t>();
    if (j.contains("launch_time") && !j.at("launch_time").is_null())
        c.launch_time = j.at("launch_time").get<std::int64_t>();
    validate(c);
    return c;
}

inline json config_to_json(const PipelineConfig& c) {
    json j;
    j["featurizer"] = featurizer_name(c.featurizer);
    json blocks = json::array();
    if (c.use_slf) blocks.push_back("slf");
    if (c.use_sf) blocks.push_back("sf");
    j["non_textual"] = blocks;
    j["classifier"] = c.classifier == Classifier::LogReg ? "logreg" : "nb";
    j["vocab_size"] = c.vocab_size;
    j["tokenizer"] = {
        {"mode", c.tokenizer_mode == textfeat::TokenizerMode::UnicodeWords ? "unicode_words"
                 : c.tokenizer_mode == textfeat::TokenizerMode::Whitespace ? "whitespace"
                                                                           : "pretokenized"},
        {"lowercase", c.lowercase}};
    const auto path_or_null = [](const std::string& p) {
        return p.empty() ? json(nullptr) : json(p);
    };
    j["lexicons"] = {{"stopwords", path_or_null(c.stopword_path)},
                     {"domain", path_or_null(c.domain_path)},
                     {"keywords", path_or_null(c.keyword_path)}};
    j["lda"] = {{"k", c.lda.k},
                {"alpha", c.lda.alpha > 0 ? json(c.lda.alpha) : json(nullptr)},
                {"beta", c.lda.beta},
                {"iterations", c.lda.n_iterations},
                {"infer_iterations", c.lda.n_infer_iterations}};
    j["dbn"] = {{"layout", c.dbn_layout},
                {"learning_rate", c.dbn.learning_rate},
                {"weight_cost", c.dbn.weight_cost},
                {"momentum_initial", c.dbn.momentum_initial},
                {"momentum_final", c.dbn.momentum_final},
                {"momentum_switch_epoch", c.dbn.momentum_switch_epoch},
                {"epochs", c.dbn.n_epochs},
                {"batch_size", c.dbn.batch_size}};
    j["logreg"] = {{"l2", c.logreg.l2},
                   {"learning_rate", c.logreg.learning_rate},
                   {"iterations", c.logreg.n_iterations}};
    j["protocol"] = {{"k", c.k_folds}, {"trials", c.n_trials}};
    j["seed"] = c.seed;
    j["collection_time"] = c.collection_time ? json(*c.collection_time) : json(nullptr);
    j["launch_time"] = c.launch_time ? json(*c.launch_time) : json(nullptr);
    return j;
}

inline std::string config_fingerprint(const PipelineConfig& c) {
    return to_hex(fnv1a64(config_to_json(c).dump()));
}

// ---------------------------------------------------------------------------
// Featurization

inline textfeat::TokenizerConfig tokenizer_config(const PipelineConfig& c) {
    textfeat::TokenizerConfig cfg;
    cfg.mode = c.tokenizer_mode;
    cfg.lowercase = c.lowercase;
    if (!c.stopword_path.empty()) cfg.stopwords = textfeat::load_stopwords(c.stopword_path);
    return cfg;
}

inline handfeat::Lexicons load_lexicons(const PipelineConfig& c) {
    handfeat::Lexicons lex;
    if (!c.stopword_path.empty()) lex.stopwords = handfeat::load_lexicon(c.stopword_path);
    if (!c.domain_path.empty()) lex.domain_words = handfeat::load_lexicon(c.domain_path);
    lex.keywords = c.keyword_path.empty() ? lex.domain_words
                                          : handfeat::load_lexicon(c.keyword_path);
    return lex;
}

struct FittedFeaturizer {
    Featurizer kind = Featurizer::None;
    textfeat::Vocabulary vocab;       // word featurizers and the DBN input layer
    topicmodel::TopicModel topic;
    beliefnet::DbnModel dbn;
    LdaConfig lda;
};

namespace detail {

inline Matrix binary_rows(const Corpus& c, const std::vector<std::size_t>& idx,
                          const textfeat::Vocabulary& vocab,
                          const textfeat::TokenizerConfig& cfg) {
    Matrix m(idx.size(), vocab.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto sv = textfeat::encode_binary(c.pairs[idx[r]].answer_text, vocab, cfg);
        for (std::size_t k = 0; k < sv.indices.size(); ++k) m(r, sv.indices[k]) = 1.0;
    }
    return m;
}

inline std::vector<std::size_t> all_indices(const Corpus& c) {
    std::vector<std::size_t> idx(c.pairs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
}

inline Corpus subset_for_fit(const Corpus& c, const std::vector<std::size_t>& idx) {
    Corpus out;
    out.meta = c.meta;
    out.pairs.reserve(idx.size());
    for (std::size_t i : idx) out.pairs.push_back(c.pairs[i]);
    return out;
}

}  // namespace detail

// Fits whatever the configured featurizer needs, on the given subset only.
inline FittedFeaturizer fit_featurizer(const Corpus& c, const std::vector<std::size_t>& train_idx,
                                       const PipelineConfig& cfg,
                                       const textfeat::TokenizerConfig& tok,
                                       std::uint64_t cell_seed) {
    FittedFeaturizer f;
    f.kind = cfg.featurizer;
    f.lda = cfg.lda;
    const Corpus train = detail::subset_for_fit(c, train_idx);
    switch (cfg.featurizer) {
        case Featurizer::WordBinary:
            f.vocab = textfeat::build_vocabulary(train, cfg.vocab_size, tok);
            break;
        case Featurizer::WordChiTfidf:
            f.vocab = textfeat::chi_tfidf_vocabulary(train, cfg.vocab_size, tok);
            break;
        case Featurizer::Topic:
            f.topic = topicmodel::fit_lda(train, cfg.lda.k, cfg.lda.alpha, cfg.lda.beta,
                                          cfg.lda.n_iterations,
                                          derive_seed(cell_seed, "lda"), tok);
            break;
        case Featurizer::Dbn: {
            f.vocab = textfeat::build_vocabulary(train, cfg.vocab_size, tok);
            std::vector<std::size_t> local(train.pairs.size());
            for (std::size_t i = 0; i < local.size(); ++i) local[i] = i;
            const Matrix data = detail::binary_rows(train, local, f.vocab, tok);
            // A small corpus can yield fewer distinct terms than requested;
            // the input layer shrinks to match.
            std::vector<std::size_t> layout = cfg.dbn_layout;
            layout[0] = f.vocab.size();
            beliefnet::TrainHyper hyper = cfg.dbn;
            hyper.seed = derive_seed(cell_seed, "dbn");
            f.dbn = beliefnet::train_dbn(data, layout, hyper);
            break;
        }
        case Featurizer::None:
            break;
    }
    return f;
}

// Dense textual block for the indexed pairs; empty rows for featurizer none.
inline learner::Rows encode_textual(const Corpus& c, const std::vector<std::size_t>& idx,
                                    const FittedFeaturizer& f,
                                    const textfeat::TokenizerConfig& tok,
                                    std::uint64_t cell_seed, std::string_view split_tag) {
    learner::Rows rows(idx.size());
    switch (f.kind) {
        case Featurizer::WordBinary: {
            for (std::size_t r = 0; r < idx.size(); ++r) {
                std::vector<double> dense(f.vocab.size(), 0.0);
                const auto sv = textfeat::encode_binary(c.pairs[idx[r]].answer_text, f.vocab, tok);
                for (std::size_t k = 0; k < sv.indices.size(); ++k) dense[sv.indices[k]] = 1.0;
                rows[r] = std::move(dense);
            }
            break;
        }
        case Featurizer::WordChiTfidf: {
            for (std::size_t r = 0; r < idx.size(); ++r) {
                std::vector<double> dense(f.vocab.size(), 0.0);
                const auto sv = textfeat::encode_tfidf(c.pairs[idx[r]].answer_text, f.vocab, tok);
                for (std::size_t k = 0; k < sv.indices.size(); ++k)
                    dense[sv.indices[k]] = sv.values[k];
                rows[r] = std::move(dense);
            }
            break;
        }
        case Featurizer::Topic: {
            for (std::size_t r = 0; r < idx.size(); ++r)
                rows[r] = topicmodel::infer_topics(
                    c.pairs[idx[r]].answer_text, f.topic, f.lda.n_infer_iterations,
                    derive_seed(cell_seed, split_tag, r), tok);
            break;
        }
        case Featurizer::Dbn: {
            const Matrix binary = detail::binary_rows(c, idx, f.vocab, tok);
            const Matrix encoded = beliefnet::encode_rows(f.dbn, binary);
            for (std::size_t r = 0; r < idx.size(); ++r)
                rows[r].assign(encoded.row(r), encoded.row(r) + encoded.cols);
            break;
        }
        case Featurizer::None: {
            for (auto& row : rows) row.clear();
            break;
        }
    }
    return rows;
}

struct HandBlocks {
    std::vector<handfeat::SurfaceFeatures> slf;
    std::vector<handfeat::SocialFeatures> sf;
};

inline HandBlocks hand_blocks(const Corpus& c, const handfeat::Lexicons& lex,
                              const textfeat::TokenizerConfig& tok,
                              const PipelineConfig& cfg) {
    HandBlocks hb;
    const auto ctx = handfeat::make_surface_context(lex, tok);
    const std::int64_t collection =
        cfg.collection_time ? *cfg.collection_time : c.effective_collection_time();
    const std::int64_t launch = cfg.launch_time ? *cfg.launch_time : c.effective_launch_time();
    hb.slf.reserve(c.pairs.size());
    hb.sf.reserve(c.pairs.size());
    for (const auto& qa : c.pairs) {
        hb.slf.push_back(handfeat::surface_features(qa, ctx));
        hb.sf.push_back(handfeat::social_features(c.profile_for(qa), qa, collection, launch));
    }
    return hb;
}

inline learner::Rows assemble(const learner::Rows& textual, const HandBlocks& hb,
                              const std::vector<std::size_t>& idx,
                              const handfeat::BlockMask& mask) {
    learner::Rows rows(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto u = handfeat::unify(textual[r], hb.slf[idx[r]], hb.sf[idx[r]], mask);
        rows[r] = u.values;
    }
    return rows;
}

inline std::vector<int> labels_for(const Corpus& c, const std::vector<std::size_t>& idx) {
    std::vector<int> y(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        if (!c.pairs[idx[r]].label) throw ValidationError("unlabeled record in protocol run");
        y[r] = c.pairs[idx[r]].label == Label::High ? 1 : 0;
    }
    return y;
}

// ---------------------------------------------------------------------------
// Classifier cell: normalize, train, score

struct CellResult {
    learner::Prf1 prf;
    double auc = 0.0;
};

namespace detail {

inline CellResult run_cell(learner::Rows x_train, learner::Rows x_test,
                           const std::vector<int>& y_train, const std::vector<int>& y_test,
                           const PipelineConfig& cfg, std::uint64_t cell_seed) {
    const auto normalizer = handfeat::fit_normalizer(x_train);
    handfeat::apply_normalizer(normalizer, x_train);
    handfeat::apply_normalizer(normalizer, x_test);
    std::vector<double> scores(x_test.size());
    std::vector<int> predicted(x_test.size());
    if (cfg.classifier == Classifier::LogReg) {
        learner::LogRegConfig lr_cfg = cfg.logreg;
        lr_cfg.seed = derive_seed(cell_seed, "logreg");
        const auto model = learner::train_logreg(x_train, y_train, lr_cfg);
        for (std::size_t i = 0; i < x_test.size(); ++i) {
            const auto [p, label] = learner::predict_quality(model, x_test[i]);
            scores[i] = p;
            predicted[i] = label;
        }
    } else {
        const auto model = learner::train_nb(x_train, y_train);
        for (std::size_t i = 0; i < x_test.size(); ++i) {
            const auto [p, label] = learner::predict_nb(model, x_test[i]);
            scores[i] = p;
            predicted[i] = label;
        }
    }
    CellResult out;
    out.prf = learner::prf1(predicted, y_test);
    out.auc = learner::auc(scores, y_test);
    return out;
}

inline void split_indices(const Corpus& c, const corpus::FoldPlan& plan, std::size_t fold,
                          std::vector<std::size_t>& train_idx,
                          std::vector<std::size_t>& test_idx) {
    train_idx.clear();
    test_idx.clear();
    for (std::size_t i = 0; i < c.pairs.size(); ++i) {
        auto it = plan.assignments.find(c.pairs[i].id);
        if (it == plan.assignments.end()) throw RuntimeFailure("fold plan missing an id");
        (it->second == fold ? test_idx : train_idx).push_back(i);
    }
}

}  // namespace detail

}  // namespace hqa::pipeline

namespace hqa::learner {

// Full protocol: per trial, fresh stratified folds; per fold, every fitted
// stage (vocabulary, topic model, belief net, normalizer) sees the training
// split only. Rows are reported in (trial, fold) order.
inline EvalReport cross_validate(const corpus::Corpus& c,
                                 const pipeline::PipelineConfig& cfg) {
    pipeline::validate(cfg);
    corpus::require_labels(c);
    const auto tok = pipeline::tokenizer_config(cfg);
    const auto lex = pipeline::load_lexicons(cfg);
    const auto hb = pipeline::hand_blocks(c, lex, tok, cfg);
    const handfeat::BlockMask mask{cfg.featurizer != pipeline::Featurizer::None, cfg.use_slf,
                                   cfg.use_sf};
    EvalReport report;
    report.n_trials = cfg.n_trials;
    report.n_folds = cfg.k_folds;
    report.config_fingerprint = pipeline::config_fingerprint(cfg);
    for (std::size_t trial = 0; trial < cfg.n_trials; ++trial) {
        const auto plan =
            corpus::make_folds(c, cfg.k_folds, derive_seed(cfg.seed, "folds", trial));
        for (std::size_t fold = 0; fold < cfg.k_folds; ++fold) {
            std::vector<std::size_t> train_idx, test_idx;
            pipeline::detail::split_indices(c, plan, fold, train_idx, test_idx);
            const std::uint64_t cell_seed = derive_seed(cfg.seed, "cell", trial, fold);
            const auto fitted = pipeline::fit_featurizer(c, train_idx, cfg, tok, cell_seed);
            const auto text_train =
                pipeline::encode_textual(c, train_idx, fitted, tok, cell_seed, "train_doc");
            const auto text_test =
                pipeline::encode_textual(c, test_idx, fitted, tok, cell_seed, "test_doc");
            const auto x_train = pipeline::assemble(text_train, hb, train_idx, mask);
            const auto x_test = pipeline::assemble(text_test, hb, test_idx, mask);
            const auto cell = pipeline::detail::run_cell(x_train, x_test,
                                                         pipeline::labels_for(c, train_idx),
                                                         pipeline::labels_for(c, test_idx), cfg,
                                                         cell_seed);
            FoldRow row;
            row.trial = trial;
            row.fold = fold;
            row.precision = cell.prf.precision;
            row.recall = cell.prf.recall;
            row.f1 = cell.prf.f1;
            row.auc = cell.auc;
            report.rows.push_back(row);
        }
    }
    finalize_report(report);
    return report;
}

}  // namespace hqa::learner

namespace hqa::pipeline {

// ---------------------------------------------------------------------------
// Ablation grid: 4 featurizers x {baseline, +slf, +sf, +slf+sf}

struct AblateCell {
    Featurizer featurizer;
    handfeat::BlockMask mask;
    learner::EvalReport report;
};

struct AblateResult {
    std::vector<AblateCell> cells;  // featurizer-major, mask-minor
    // Pairwise t-tests between the textual baselines, per metric.
    std::vector<std::vector<learner::TTestResult>> f1_tests;
    std::vector<std::vector<learner::TTestResult>> auc_tests;
    std::vector<Featurizer> featurizers;
};

// Same per-cell numbers as independent cross_validate runs with the same
// master seed: fold plans and cell seeds depend only on (seed, trial, fold),
// so each featurizer is fitted once per fold and shared across the masks.
inline AblateResult ablate(const Corpus& c, const PipelineConfig& base_cfg) {
    corpus::require_labels(c);
    AblateResult result;
    result.featurizers = {Featurizer::WordBinary, Featurizer::WordChiTfidf, Featurizer::Topic,
                          Featurizer::Dbn};
    const std::vector<handfeat::BlockMask> masks = {
        {true, false, false}, {true, true, false}, {true, false, true}, {true, true, true}};

    const auto tok = tokenizer_config(base_cfg);
    const auto lex = load_lexicons(base_cfg);
    const auto hb = hand_blocks(c, lex, tok, base_cfg);

    std::vector<PipelineConfig> cell_cfgs;
    for (Featurizer f : result.featurizers) {
        PipelineConfig cfg = base_cfg;
        cfg.featurizer = f;
        validate(cfg);
        cell_cfgs.push_back(cfg);
    }

    for (std::size_t fi = 0; fi < result.featurizers.size(); ++fi) {
        for (const auto& mask : masks) {
            AblateCell cell;
            cell.featurizer = result.featurizers[fi];
            cell.mask = mask;
            PipelineConfig cfg = cell_cfgs[fi];
            cfg.use_slf = mask.slf;
            cfg.use_sf = mask.sf;
            cell.report.n_trials = cfg.n_trials;
            cell.report.n_folds = cfg.k_folds;
            cell.report.config_fingerprint = config_fingerprint(cfg);
            result.cells.push_back(std::move(cell));
        }
    }

    for (std::size_t trial = 0; trial < base_cfg.n_trials; ++trial) {
        const auto plan =
            corpus::make_folds(c, base_cfg.k_folds, derive_seed(base_cfg.seed, "folds", trial));
        for (std::size_t fold = 0; fold < base_cfg.k_folds; ++fold) {
            std::vector<std::size_t> train_idx, test_idx;
            detail::split_indices(c, plan, fold, train_idx, test_idx);
            const std::uint64_t cell_seed = derive_seed(base_cfg.seed, "cell", trial, fold);
            const auto y_train = labels_for(c, train_idx);
            const auto y_test = labels_for(c, test_idx);
            for (std::size_t fi = 0; fi < result.featurizers.size(); ++fi) {
                const auto fitted =
                    fit_featurizer(c, train_idx, cell_cfgs[fi], tok, cell_seed);
                const auto text_train =
                    encode_textual(c, train_idx, fitted, tok, cell_seed, "train_doc");
                const auto text_test =
                    encode_textual(c, test_idx, fitted, tok, cell_seed, "test_doc");
                for (std::size_t mi = 0; mi < masks.size(); ++mi) {
                    const auto x_train = assemble(text_train, hb, train_idx, masks[mi]);
                    const auto x_test = assemble(text_test, hb, test_idx, masks[mi]);
                    const auto cell = detail::run_cell(x_train, x_test, y_train, y_test,
                                                       cell_cfgs[fi], cell_seed);
                    learner::FoldRow row;
                    row.trial = trial;
                    row.fold = fold;
                    row.precision = cell.prf.precision;
                    row.recall = cell.prf.recall;
                    row.f1 = cell.prf.f1;
                    row.auc = cell.auc;
                    result.cells[fi * masks.size() + mi].report.rows.push_back(row);
                }
            }
        }
    }
    for (auto& cell : result.cells) learner::finalize_report(cell.report);

    // Baseline textual cells pair by (trial, fold) for the method t-tests.
    const auto baseline_metric = [&](std::size_t fi, bool use_f1) {
        std::vector<double> xs;
        for (const auto& row : result.cells[fi * masks.size()].report.rows)
            xs.push_back(use_f1 ? row.f1 : row.auc);
        return xs;
    };
    const std::size_t nf = result.featurizers.size();
    result.f1_tests.assign(nf, std::vector<learner::TTestResult>(nf));
    result.auc_tests.assign(nf, std::vector<learner::TTestResult>(nf));
    for (std::size_t a = 0; a < nf; ++a) {
        for (std::size_t b = 0; b < nf; ++b) {
            result.f1_tests[a][b] =
                learner::paired_ttest(baseline_metric(a, true), baseline_metric(b, true));
            result.auc_tests[a][b] =
                learner::paired_ttest(baseline_metric(a, false), baseline_metric(b, false));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Chi-squared ranking of the hand-crafted blocks

struct RankResult {
    learner::FeatureRanking ranking;
    std::vector<std::string> names;       // slf1..slf14, sf1..sf26
    learner::Rows feature_rows;           // aligned with corpus order
    std::vector<int> labels;
};

inline RankResult rank_features(const Corpus& c, const PipelineConfig& cfg,
                                std::size_t n_bins = 10) {
    corpus::require_labels(c);
    const auto tok = tokenizer_config(cfg);
    const auto lex = load_lexicons(cfg);
    const auto hb = hand_blocks(c, lex, tok, cfg);
    RankResult out;
    for (const auto* n : handfeat::surface_feature_names()) out.names.push_back(n);
    for (const auto* n : handfeat::social_feature_names()) out.names.push_back(n);
    out.feature_rows.resize(c.pairs.size());
    for (std::size_t i = 0; i < c.pairs.size(); ++i) {
        auto& row = out.feature_rows[i];
        row.insert(row.end(), hb.slf[i].values.begin(), hb.slf[i].values.end());
        row.insert(row.end(), hb.sf[i].values.begin(), hb.sf[i].values.end());
    }
    out.labels.resize(c.pairs.size());
    for (std::size_t i = 0; i < c.pairs.size(); ++i)
        out.labels[i] = c.pairs[i].label == Label::High ? 1 : 0;
    out.ranking = learner::chi_squared_rank(out.feature_rows, out.names, out.labels, n_bins);
    return out;
}

// ---------------------------------------------------------------------------
// Run artifacts: fit on the full corpus, persist, re-score later

struct RunArtifact {
    PipelineConfig config;
    FittedFeaturizer fitted;
    handfeat::Normalizer normalizer;
    learner::LogRegModel logreg;
    learner::NbModel nb;
    handfeat::Lexicons lexicons;
    std::int64_t collection_time = 0;
    std::int64_t launch_time = 0;
    std::string fingerprint;
    std::optional<learner::EvalReport> report;  // cross-validation run at train time, if any
};

// The artifact tokenizes with its own persisted stopword set, never with the
// config paths, so a relocated model directory keeps scoring identically.
inline textfeat::TokenizerConfig artifact_tokenizer(const RunArtifact& art) {
    textfeat::TokenizerConfig cfg;
    cfg.mode = art.config.tokenizer_mode;
    cfg.lowercase = art.config.lowercase;
    if (!art.lexicons.stopwords.empty())
        cfg.stopwords =
            std::make_shared<const std::unordered_set<std::string>>(art.lexicons.stopwords);
    return cfg;
}

inline RunArtifact train_artifact(const Corpus& c, const PipelineConfig& cfg) {
    validate(cfg);
    corpus::require_labels(c);
    RunArtifact art;
    art.config = cfg;
    art.fingerprint = config_fingerprint(cfg);
    art.lexicons = load_lexicons(cfg);
    const auto tok = artifact_tokenizer(art);
    art.collection_time =
        cfg.collection_time ? *cfg.collection_time : c.effective_collection_time();
    art.launch_time = cfg.launch_time ? *cfg.launch_time : c.effective_launch_time();
    const auto idx = detail::all_indices(c);
    const std::uint64_t cell_seed = derive_seed(cfg.seed, "final_fit");
    art.fitted = fit_featurizer(c, idx, cfg, tok, cell_seed);

    PipelineConfig hb_cfg = cfg;
    hb_cfg.collection_time = art.collection_time;
    hb_cfg.launch_time = art.launch_time;
    const auto hb = hand_blocks(c, art.lexicons, tok, hb_cfg);
    const handfeat::BlockMask mask{cfg.featurizer != Featurizer::None, cfg.use_slf, cfg.use_sf};
    const auto textual = encode_textual(c, idx, art.fitted, tok, cell_seed, "train_doc");
    auto x = assemble(textual, hb, idx, mask);
    const auto y = labels_for(c, idx);
    art.normalizer = handfeat::fit_normalizer(x);
    handfeat::apply_normalizer(art.normalizer, x);
    if (cfg.classifier == Classifier::LogReg) {
        learner::LogRegConfig lr_cfg = cfg.logreg;
        lr_cfg.seed = derive_seed(cell_seed, "logreg");
        art.logreg = learner::train_logreg(x, y, lr_cfg);
    } else {
        art.nb = learner::train_nb(x, y);
    }
    return art;
}

struct Prediction {
    std::string id;
    double probability = 0.0;
    int label = 0;  // 1 = high
};

// Scores new pairs with the artifact's featurizer, reference times, and
// normalizer; bitwise identical to in-memory scoring of the same pairs.
inline std::vector<Prediction> predict_with_artifact(const RunArtifact& art, const Corpus& c) {
    const auto tok = artifact_tokenizer(art);
    const auto idx = detail::all_indices(c);
    PipelineConfig hb_cfg = art.config;
    hb_cfg.collection_time = art.collection_time;
    hb_cfg.launch_time = art.launch_time;
    const auto hb = hand_blocks(c, art.lexicons, tok, hb_cfg);
    const handfeat::BlockMask mask{art.config.featurizer != Featurizer::None,
                                   art.config.use_slf, art.config.use_sf};
    const std::uint64_t cell_seed = derive_seed(art.config.seed, "final_fit");
    const auto textual = encode_textual(c, idx, art.fitted, tok, cell_seed, "predict_doc");
    auto x = assemble(textual, hb, idx, mask);
    handfeat::apply_normalizer(art.normalizer, x);
    std::vector<Prediction> out(c.pairs.size());
    for (std::size_t i = 0; i < c.pairs.size(); ++i) {
        const auto [p, label] = art.config.classifier == Classifier::LogReg
                                    ? learner::predict_quality(art.logreg, x[i])
                                    : learner::predict_nb(art.nb, x[i]);
        out[i] = {c.pairs[i].id, p, label};
    }
    return out;
}

}  // namespace hqa::pipeline
