#pragma once

// Command layer: the seven verbs (ingest, synth, evaluate, ablate, rank,
// train, predict), run-artifact persistence, and aligned-text renderings of
// every JSON report. Command functions are callable in-process; run_cli wraps
// them with argument parsing and the exit-code contract (0 ok, 1 validation
// failure, 2 runtime failure).

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hqa/pipeline.hpp"

namespace hqa::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;
using corpus::Corpus;
using pipeline::PipelineConfig;

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// p-values span many magnitudes; switch to scientific below 1e-4.
inline std::string fmt_p(double p) {
    if (p >= 1e-4) return fmt_double(p, 4);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2e", p);
    return buf;
}

inline std::string fmt_mean_std(const learner::MetricSummary& s) {
    return fmt_double(s.mean, 4) + " ± " + fmt_double(s.stddev, 4);
}

// ---------------------------------------------------------------------------
// Input loading shared by the protocol commands

inline Corpus load_inputs(const fs::path& corpus_path, const fs::path& profiles_path,
                          bool require_labels, bool strict) {
    auto loaded = corpus::load_corpus(corpus_path, require_labels);
    std::vector<corpus::Reject> rejects = std::move(loaded.rejects);
    if (!profiles_path.empty()) corpus::load_profiles(profiles_path, loaded.corpus, &rejects);
    if (!rejects.empty()) {
        const std::string head = "rejected " + std::to_string(rejects.size()) +
                                 " record(s); first: line " +
                                 std::to_string(rejects.front().line_no) + ", " +
                                 rejects.front().reason;
        if (strict) throw ValidationError(head);
        std::cerr << "warning: " << head << "\n";
    }
    return std::move(loaded.corpus);
}

// ---------------------------------------------------------------------------
// Run-artifact persistence (self-describing model directory)

inline void save_artifact(const pipeline::RunArtifact& art, const fs::path& dir) {
    fs::create_directories(dir);
    std::vector<std::string> files;
    const auto put = [&](const std::string& name, const std::string& content) {
        write_text_file_atomic(dir / name, content);
        files.push_back(name);
    };
    put("config.json", dump_json(pipeline::config_to_json(art.config)));
    {
        const auto sorted = [](const std::unordered_set<std::string>& s) {
            std::vector<std::string> v(s.begin(), s.end());
            std::sort(v.begin(), v.end());
            return v;
        };
        json lex;
        lex["stopwords"] = sorted(art.lexicons.stopwords);
        lex["domain_words"] = sorted(art.lexicons.domain_words);
        lex["keywords"] = sorted(art.lexicons.keywords);
        put("lexicons.json", dump_json(lex));
    }
    if (!art.fitted.vocab.terms.empty())
        put("vocabulary.json", dump_json(textfeat::vocabulary_to_json(art.fitted.vocab)));
    if (art.config.featurizer == pipeline::Featurizer::Topic)
        put("topic_model.json", dump_json(topicmodel::topic_model_to_json(art.fitted.topic)));
    if (art.config.featurizer == pipeline::Featurizer::Dbn) {
        beliefnet::save_dbn(art.fitted.dbn, dir / "dbn.bin");
        files.push_back("dbn.bin");
        files.push_back("dbn.bin.json");
    }
    {
        json n;
        n["mean"] = art.normalizer.mean;
        n["stddev"] = art.normalizer.stddev;
        put("normalizer.json", dump_json(n));
    }
    {
        json c;
        if (art.config.classifier == pipeline::Classifier::LogReg) {
            c["kind"] = "logreg";
            c["model"] = learner::logreg_to_json(art.logreg);
        } else {
            c["kind"] = "nb";
            c["model"] = learner::nb_to_json(art.nb);
        }
        put("classifier.json", dump_json(c));
    }
    if (art.report) {
        json r;
        r["config"] = pipeline::config_to_json(art.config);
        r["report"] = learner::report_to_json(*art.report);
        put("report.json", dump_json(r));
    }
    json manifest;
    manifest["format"] = "hqa_artifact";
    manifest["version"] = 1;
    manifest["fingerprint"] = art.fingerprint;
    manifest["featurizer"] = pipeline::featurizer_name(art.config.featurizer);
    manifest["classifier"] = art.config.classifier == pipeline::Classifier::LogReg ? "logreg" : "nb";
    manifest["collection_time"] = art.collection_time;
    manifest["launch_time"] = art.launch_time;
    std::sort(files.begin(), files.end());
    manifest["files"] = files;
    write_text_file_atomic(dir / "manifest.json", dump_json(manifest));
}

inline pipeline::RunArtifact load_artifact(const fs::path& dir) {
    const auto read_json = [&](const std::string& name) {
        return json::parse(read_text_file(dir / name));
    };
    pipeline::RunArtifact art;
    const json manifest = read_json("manifest.json");
    if (!manifest.is_object() || manifest.value("format", "") != "hqa_artifact")
        throw ValidationError("not a model directory: " + dir.string());
    art.config = pipeline::config_from_json(read_json("config.json"));
    art.fingerprint = manifest.at("fingerprint").get<std::string>();
    if (art.fingerprint != pipeline::config_fingerprint(art.config))
        throw ValidationError("artifact fingerprint does not match its config: " + dir.string());
    art.collection_time = manifest.at("collection_time").get<std::int64_t>();
    art.launch_time = manifest.at("launch_time").get<std::int64_t>();
    {
        const json lex = read_json("lexicons.json");
        const auto to_set = [&](const char* key) {
            std::unordered_set<std::string> s;
            for (const auto& w : lex.at(key)) s.insert(w.get<std::string>());
            return s;
        };
        art.lexicons.stopwords = to_set("stopwords");
        art.lexicons.domain_words = to_set("domain_words");
        art.lexicons.keywords = to_set("keywords");
    }
    art.fitted.kind = art.config.featurizer;
    art.fitted.lda = art.config.lda;
    if (fs::exists(dir / "vocabulary.json"))
        art.fitted.vocab = textfeat::vocabulary_from_json(read_json("vocabulary.json"));
    if (art.config.featurizer == pipeline::Featurizer::Topic)
        art.fitted.topic = topicmodel::topic_model_from_json(read_json("topic_model.json"));
    if (art.config.featurizer == pipeline::Featurizer::Dbn)
        art.fitted.dbn = beliefnet::load_dbn(dir / "dbn.bin");
    {
        const json n = read_json("normalizer.json");
        art.normalizer.mean = n.at("mean").get<std::vector<double>>();
        art.normalizer.stddev = n.at("stddev").get<std::vector<double>>();
    }
    {
        const json c = read_json("classifier.json");
        const std::string kind = c.at("kind").get<std::string>();
        if (kind == "logreg")
            art.logreg = learner::logreg_from_json(c.at("model"));
        else if (kind == "nb")
            art.nb = learner::nb_from_json(c.at("model"));
        else
            throw ValidationError("unknown classifier kind in artifact: " + kind);
    }
    return art;
}

// ---------------------------------------------------------------------------
// Text renderings

inline std::string blocks_name(const PipelineConfig& cfg) {
    handfeat::BlockMask mask{cfg.featurizer != pipeline::Featurizer::None, cfg.use_slf,
                             cfg.use_sf};
    return mask.name();
}

inline std::string render_report_text(const learner::EvalReport& r, const PipelineConfig& cfg) {
    std::string out = "evaluation report\n";
    out += "  featurizer   " + pipeline::featurizer_name(cfg.featurizer) + "\n";
    out += "  blocks       " + blocks_name(cfg) + "\n";
    out += "  classifier   " + std::string(cfg.classifier == pipeline::Classifier::LogReg
                                               ? "logreg"
                                               : "nb") + "\n";
    out += "  protocol     " + std::to_string(r.n_folds) + " folds x " +
           std::to_string(r.n_trials) + " trials\n";
    out += "  seed         " + std::to_string(cfg.seed) + "\n";
    out += "  fingerprint  " + r.config_fingerprint + "\n\n";
    out += "  metric  mean ± std\n";
    out += "  P       " + fmt_mean_std(r.precision) + "\n";
    out += "  R       " + fmt_mean_std(r.recall) + "\n";
    out += "  F1      " + fmt_mean_std(r.f1) + "\n";
    out += "  AUC     " + fmt_mean_std(r.auc) + "\n\n";
    out += "  trial  fold       P       R      F1     AUC\n";
    for (const auto& row : r.rows) {
        out += "  " + pad_left(std::to_string(row.trial), 5) + "  " +
               pad_left(std::to_string(row.fold), 4) + "  " +
               pad_left(fmt_double(row.precision, 4), 6) + "  " +
               pad_left(fmt_double(row.recall, 4), 6) + "  " +
               pad_left(fmt_double(row.f1, 4), 6) + "  " + pad_left(fmt_double(row.auc, 4), 6) +
               "\n";
    }
    return out;
}

inline std::string render_ablate_text(const pipeline::AblateResult& r,
                                      const PipelineConfig& cfg) {
    std::string out = "feature combination grid (mean ± std over " +
                      std::to_string(cfg.n_trials) + " trials x " +
                      std::to_string(cfg.k_folds) + " folds)\n";
    const std::size_t n_masks = r.cells.size() / r.featurizers.size();
    for (std::size_t fi = 0; fi < r.featurizers.size(); ++fi) {
        out += "\nfeaturizer " + pipeline::featurizer_name(r.featurizers[fi]) + "\n";
        out += "  " + pad_right("blocks", 16) + pad_right("P", 18) + pad_right("R", 18) +
               pad_right("F1", 18) + "AUC\n";
        for (std::size_t mi = 0; mi < n_masks; ++mi) {
            const auto& cell = r.cells[fi * n_masks + mi];
            out += "  " + pad_right(cell.mask.name(), 16) +
                   pad_right(fmt_mean_std(cell.report.precision), 18) +
                   pad_right(fmt_mean_std(cell.report.recall), 18) +
                   pad_right(fmt_mean_std(cell.report.f1), 18) +
                   fmt_mean_std(cell.report.auc) + "\n";
        }
    }
    const auto matrix = [&](const char* title,
                            const std::vector<std::vector<learner::TTestResult>>& m) {
        out += "\npaired t-test p-values, textual baselines, " + std::string(title) + "\n";
        out += "  " + pad_right("", 16);
        for (auto f : r.featurizers) out += pad_right(pipeline::featurizer_name(f), 16);
        out += "\n";
        for (std::size_t a = 0; a < m.size(); ++a) {
            out += "  " + pad_right(pipeline::featurizer_name(r.featurizers[a]), 16);
            for (std::size_t b = 0; b < m[a].size(); ++b) out += pad_right(fmt_p(m[a][b].p), 16);
            out += "\n";
        }
    };
    matrix("F1", r.f1_tests);
    matrix("AUC", r.auc_tests);
    return out;
}

inline std::string render_rank_text(const pipeline::RankResult& r, std::size_t n_bins) {
    std::string out = "chi-squared feature ranking (" + std::to_string(n_bins) +
                      " equal-frequency bins, rescaled to [0, 100])\n";
    const auto section = [&](const char* title, const char* prefix) {
        out += "\n" + std::string(title) + "\n";
        out += "  " + pad_right("rank", 6) + pad_right("feature", 9) + pad_left("chi2", 12) +
               pad_left("rescaled", 10) + "\n";
        std::size_t rank = 0;
        for (const auto& e : r.ranking.entries) {
            if (e.name.rfind(prefix, 0) != 0) continue;
            ++rank;
            out += "  " + pad_right(std::to_string(rank), 6) + pad_right(e.name, 9) +
                   pad_left(fmt_double(e.statistic, 4), 12) +
                   pad_left(fmt_double(e.rescaled, 2), 10) + "\n";
        }
    };
    section("surface features", "slf");
    section("social features", "sf");
    return out;
}

// ---------------------------------------------------------------------------
// Commands

struct IngestOptions {
    fs::path input;
    fs::path profiles;        // optional
    fs::path out_dir = ".";
    fs::path output_corpus;   // default out_dir/corpus.jsonl
    std::size_t min_chars = 15;
    bool strict = false;
};

inline json cmd_ingest(const IngestOptions& opt) {
    auto loaded = corpus::load_corpus(opt.input, /*require_labels=*/true);
    std::vector<corpus::Reject> profile_rejects;
    if (!opt.profiles.empty())
        corpus::load_profiles(opt.profiles, loaded.corpus, &profile_rejects);
    const std::size_t n_loaded = loaded.corpus.pairs.size();
    const Corpus kept = corpus::filter_min_answer_length(loaded.corpus, opt.min_chars);

    const fs::path corpus_out =
        opt.output_corpus.empty() ? opt.out_dir / "corpus.jsonl" : opt.output_corpus;
    write_text_file_atomic(corpus_out, corpus::corpus_to_jsonl(kept));
    if (!opt.profiles.empty())
        write_text_file_atomic(opt.out_dir / "profiles.jsonl", corpus::profiles_to_jsonl(kept));

    const auto rejects_json = [](const std::vector<corpus::Reject>& rs) {
        json arr = json::array();
        for (const auto& r : rs) arr.push_back({{"line", r.line_no}, {"reason", r.reason}});
        return arr;
    };
    json report;
    report["n_loaded"] = n_loaded;
    report["n_kept"] = kept.pairs.size();
    report["n_filtered_short"] = n_loaded - kept.pairs.size();
    report["min_chars"] = opt.min_chars;
    report["corpus_rejects"] = rejects_json(loaded.rejects);
    report["profile_rejects"] = rejects_json(profile_rejects);
    write_text_file_atomic(opt.out_dir / "ingest_report.json", dump_json(report));

    const std::size_t n_rejected = loaded.rejects.size() + profile_rejects.size();
    if (opt.strict && n_rejected > 0)
        throw ValidationError(std::to_string(n_rejected) + " record(s) rejected during ingest");
    return report;
}

struct SynthOptions {
    fs::path spec_path;  // optional; defaults apply
    std::optional<std::uint64_t> seed;
    fs::path out_dir = ".";
};

inline json cmd_synth(const SynthOptions& opt) {
    corpus::SynthSpec spec;
    if (!opt.spec_path.empty())
        spec = corpus::parse_synth_spec(json::parse(read_text_file(opt.spec_path)));
    const std::uint64_t seed = opt.seed ? *opt.seed : (spec.seed_set ? spec.seed : 42);
    const auto result = corpus::generate_synthetic(spec, seed);

    fs::create_directories(opt.out_dir);
    write_text_file_atomic(opt.out_dir / "corpus.jsonl", corpus::corpus_to_jsonl(result.corpus));
    write_text_file_atomic(opt.out_dir / "profiles.jsonl",
                           corpus::profiles_to_jsonl(result.corpus));
    write_text_file_atomic(opt.out_dir / "domain_words.txt", join(result.domain_words, "\n") + "\n");
    write_text_file_atomic(opt.out_dir / "promo_words.txt", join(result.promo_words, "\n") + "\n");
    write_text_file_atomic(opt.out_dir / "stopwords.txt", join(result.stopwords, "\n") + "\n");

    json meta;
    meta["seed"] = seed;
    meta["n_high"] = spec.n_high;
    meta["n_low"] = spec.n_low;
    meta["spec"] = {{"n_high", spec.n_high},
                    {"n_low", spec.n_low},
                    {"general_vocab", spec.general_vocab},
                    {"domain_vocab", spec.domain_vocab},
                    {"promo_vocab", spec.promo_vocab},
                    {"overlap_signal", spec.overlap_signal},
                    {"domain_signal", spec.domain_signal},
                    {"length_signal", spec.length_signal},
                    {"gap_signal", spec.gap_signal},
                    {"profile_signal", spec.profile_signal},
                    {"profile_missing_rate", spec.profile_missing_rate}};
    meta["collection_time"] = result.corpus.meta.collection_time
                                  ? json(*result.corpus.meta.collection_time)
                                  : json(nullptr);
    meta["launch_time"] =
        result.corpus.meta.launch_time ? json(*result.corpus.meta.launch_time) : json(nullptr);
    write_text_file_atomic(opt.out_dir / "synth_meta.json", dump_json(meta));
    return meta;
}

struct ProtocolOptions {
    fs::path corpus_path;
    fs::path profiles_path;  // optional
    fs::path out_dir = ".";
    bool strict = false;
};

inline learner::EvalReport cmd_evaluate(const ProtocolOptions& opt, const PipelineConfig& cfg) {
    const Corpus c = load_inputs(opt.corpus_path, opt.profiles_path, true, opt.strict);
    const auto report = learner::cross_validate(c, cfg);
    fs::create_directories(opt.out_dir);
    json j;
    j["config"] = pipeline::config_to_json(cfg);
    j["report"] = learner::report_to_json(report);
    write_text_file_atomic(opt.out_dir / "report.json", dump_json(j));
    write_text_file_atomic(opt.out_dir / "report.txt", render_report_text(report, cfg));
    return report;
}

inline pipeline::AblateResult cmd_ablate(const ProtocolOptions& opt, const PipelineConfig& cfg) {
    const Corpus c = load_inputs(opt.corpus_path, opt.profiles_path, true, opt.strict);
    const auto result = pipeline::ablate(c, cfg);
    fs::create_directories(opt.out_dir);
    json cells = json::array();
    const std::size_t n_masks = result.cells.size() / result.featurizers.size();
    for (std::size_t i = 0; i < result.cells.size(); ++i) {
        const auto& cell = result.cells[i];
        json jc;
        jc["featurizer"] = pipeline::featurizer_name(cell.featurizer);
        jc["blocks"] = cell.mask.name();
        jc["report"] = learner::report_to_json(cell.report);
        cells.push_back(jc);
        (void)n_masks;
    }
    const auto tests_json = [&](const std::vector<std::vector<learner::TTestResult>>& m) {
        json rows = json::array();
        for (const auto& row : m) {
            json jr = json::array();
            for (const auto& t : row) jr.push_back({{"t", t.t}, {"p", t.p}});
            rows.push_back(jr);
        }
        return rows;
    };
    json names = json::array();
    for (auto f : result.featurizers) names.push_back(pipeline::featurizer_name(f));
    json j;
    j["config"] = pipeline::config_to_json(cfg);
    j["cells"] = cells;
    j["featurizers"] = names;
    j["t_tests"] = {{"f1", tests_json(result.f1_tests)}, {"auc", tests_json(result.auc_tests)}};
    write_text_file_atomic(opt.out_dir / "ablate.json", dump_json(j));
    write_text_file_atomic(opt.out_dir / "ablate.txt", render_ablate_text(result, cfg));
    return result;
}

struct RankOptions {
    ProtocolOptions io;
    std::size_t n_bins = 10;
    bool features_csv = false;
    bool distributions = false;
    std::size_t n_groups = 10;
};

inline pipeline::RankResult cmd_rank(const RankOptions& opt, const PipelineConfig& cfg) {
    const Corpus c = load_inputs(opt.io.corpus_path, opt.io.profiles_path, true, opt.io.strict);
    const auto result = pipeline::rank_features(c, cfg, opt.n_bins);
    fs::create_directories(opt.io.out_dir);
    json entries = json::array();
    for (const auto& e : result.ranking.entries)
        entries.push_back(
            {{"feature", e.name}, {"chi2", e.statistic}, {"rescaled", e.rescaled}});
    json j;
    j["config"] = pipeline::config_to_json(cfg);
    j["n_bins"] = opt.n_bins;
    j["normalization"] = result.ranking.normalization_note;
    j["entries"] = entries;
    write_text_file_atomic(opt.io.out_dir / "rank.json", dump_json(j));
    write_text_file_atomic(opt.io.out_dir / "rank.txt", render_rank_text(result, opt.n_bins));

    if (opt.features_csv) {
        const auto tok = pipeline::tokenizer_config(cfg);
        const auto lex = pipeline::load_lexicons(cfg);
        const auto hb = pipeline::hand_blocks(c, lex, tok, cfg);
        std::vector<std::string> ids;
        for (const auto& qa : c.pairs) ids.push_back(qa.id);
        write_text_file_atomic(opt.io.out_dir / "features.csv",
                               handfeat::features_to_csv(hb.slf, hb.sf, ids));
    }
    if (opt.distributions) {
        if (c.pairs.size() < opt.n_groups)
            throw ValidationError("distributions need at least as many records as groups");
        json features = json::array();
        for (std::size_t col = 0; col < result.names.size(); ++col) {
            std::vector<double> values(c.pairs.size());
            for (std::size_t i = 0; i < c.pairs.size(); ++i)
                values[i] = result.feature_rows[i][col];
            const auto groups = learner::distribution_report(values, result.labels, opt.n_groups);
            json jg = json::array();
            for (const auto& g : groups)
                jg.push_back({{"size", g.size},
                              {"high_ratio", g.high_ratio},
                              {"low_ratio", g.low_ratio}});
            features.push_back({{"feature", result.names[col]}, {"groups", jg}});
        }
        json dj;
        dj["n_groups"] = opt.n_groups;
        dj["features"] = features;
        write_text_file_atomic(opt.io.out_dir / "distributions.json", dump_json(dj));
    }
    return result;
}

struct TrainOptions {
    ProtocolOptions io;
    fs::path model_dir;
    bool with_eval = false;
};

inline pipeline::RunArtifact cmd_train(const TrainOptions& opt, const PipelineConfig& cfg) {
    const Corpus c = load_inputs(opt.io.corpus_path, opt.io.profiles_path, true, opt.io.strict);
    auto art = pipeline::train_artifact(c, cfg);
    if (opt.with_eval) art.report = learner::cross_validate(c, cfg);
    save_artifact(art, opt.model_dir);
    return art;
}

struct PredictOptions {
    fs::path model_dir;
    fs::path input;
    fs::path profiles;  // optional
    fs::path output;    // default out_dir/predictions.jsonl
    fs::path out_dir = ".";
    bool strict = false;
};

inline std::vector<pipeline::Prediction> cmd_predict(const PredictOptions& opt) {
    const auto art = load_artifact(opt.model_dir);
    const Corpus c = load_inputs(opt.input, opt.profiles, /*require_labels=*/false, opt.strict);
    const auto predictions = pipeline::predict_with_artifact(art, c);
    const fs::path out =
        opt.output.empty() ? opt.out_dir / "predictions.jsonl" : opt.output;
    std::string lines;
    for (const auto& p : predictions) {
        json j;
        j["id"] = p.id;
        j["probability"] = p.probability;
        j["label"] = p.label == 1 ? "high" : "low";
        lines += j.dump();
        lines += '\n';
    }
    write_text_file_atomic(out, lines);
    return predictions;
}

// ---------------------------------------------------------------------------
// Argument parsing

namespace detail {

inline void apply_non_textual(PipelineConfig& cfg, const std::string& spec) {
    cfg.use_slf = cfg.use_sf = false;
    if (spec.empty() || spec == "none") return;
    for (const auto& part : split(spec, ',')) {
        if (part == "slf")
            cfg.use_slf = true;
        else if (part == "sf")
            cfg.use_sf = true;
        else
            throw ValidationError("unknown non-textual block: " + part);
    }
}

}  // namespace detail

inline void emit_error(const std::string& kind, const std::string& message, bool as_json) {
    if (as_json) {
        json j;
        j["error"] = {{"kind", kind}, {"message", message}};
        std::cerr << j.dump() << "\n";
    } else {
        std::cerr << "error: " << message << "\n";
    }
}

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"answer quality toolkit: corpus tooling, feature extraction, training,"
                 " evaluation, ranking, prediction"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = ".";
    std::uint64_t seed = 0;
    bool json_errors = false, strict = false;
    app.add_option("--config", config_path, "pipeline config JSON");
    app.add_option("--out-dir", out_dir, "directory for report files");
    auto* seed_opt = app.add_option("--seed", seed, "master seed override");
    app.add_flag("--json", json_errors, "machine-readable error JSON on stderr");
    app.add_flag("--strict", strict, "treat rejected input records as fatal");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "validate and filter a raw corpus");
    std::string in_input, in_profiles, in_output;
    std::size_t in_min_chars = 15;
    ingest->add_option("--input", in_input, "raw corpus JSONL")->required();
    ingest->add_option("--profiles", in_profiles, "physician profiles JSONL");
    ingest->add_option("--output", in_output, "canonical corpus path");
    ingest->add_option("--min-chars", in_min_chars, "minimum answer length in characters");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled corpus");
    std::string sy_spec;
    synth->add_option("--spec", sy_spec, "synthesis spec JSON");

    // shared protocol inputs
    std::string corpus_path, profiles_path;
    std::string ov_featurizer, ov_non_textual = "\x01", ov_classifier;
    std::size_t ov_k = 0, ov_trials = 0, ov_vocab = 0, ov_lda_k = 0, ov_lda_iters = 0,
                ov_dbn_epochs = 0;
    std::string ov_dbn_layout, ov_stopwords, ov_domain, ov_keywords;
    std::int64_t ov_collection = 0, ov_launch = 0;
    const auto add_protocol_options = [&](CLI::App* sub, bool with_overrides) {
        sub->add_option("--corpus", corpus_path, "canonical corpus JSONL")->required();
        sub->add_option("--profiles", profiles_path, "physician profiles JSONL");
        if (!with_overrides) return;
        sub->add_option("--featurizer", ov_featurizer,
                        "word_binary | word_chi_tfidf | topic | dbn | none");
        sub->add_option("--non-textual", ov_non_textual, "comma list of slf,sf or none");
        sub->add_option("--classifier", ov_classifier, "logreg | nb");
        sub->add_option("--k", ov_k, "folds per trial");
        sub->add_option("--trials", ov_trials, "number of trials");
        sub->add_option("--vocab-size", ov_vocab,
                        "vocabulary size (also resizes the dbn input layer)");
        sub->add_option("--lda-k", ov_lda_k, "topic count");
        sub->add_option("--lda-iterations", ov_lda_iters, "topic sampling sweeps");
        sub->add_option("--dbn-layout", ov_dbn_layout, "comma list of layer sizes");
        sub->add_option("--dbn-epochs", ov_dbn_epochs, "epochs per layer");
        sub->add_option("--stopwords", ov_stopwords, "stopword lexicon path");
        sub->add_option("--domain", ov_domain, "domain lexicon path");
        sub->add_option("--keywords", ov_keywords, "keyword lexicon path");
        sub->add_option("--collection-time", ov_collection, "crawl reference time (epoch s)");
        sub->add_option("--launch-time", ov_launch, "platform launch time (epoch s)");
    };

    auto* evaluate = app.add_subcommand("evaluate", "repeated stratified cross-validation");
    add_protocol_options(evaluate, true);
    auto* ablate = app.add_subcommand("ablate", "feature combination grid with t-tests");
    add_protocol_options(ablate, true);
    auto* rank = app.add_subcommand("rank", "chi-squared ranking of hand-crafted features");
    add_protocol_options(rank, true);
    std::size_t rk_bins = 10;
    bool rk_csv = false, rk_dist = false;
    rank->add_option("--bins", rk_bins, "equal-frequency bins");
    rank->add_flag("--features-csv", rk_csv, "also write features.csv");
    rank->add_flag("--distributions", rk_dist, "also write distributions.json");

    auto* train = app.add_subcommand("train", "fit on the full corpus and persist a model");
    add_protocol_options(train, true);
    std::string tr_model_dir;
    bool tr_eval = false;
    train->add_option("--model-dir", tr_model_dir, "output model directory")->required();
    train->add_flag("--evaluate", tr_eval, "also run cross-validation into the artifact");

    auto* predict = app.add_subcommand("predict", "score QA pairs with a persisted model");
    std::string pr_model_dir, pr_input, pr_profiles, pr_output;
    predict->add_option("--model-dir", pr_model_dir, "model directory")->required();
    predict->add_option("--input", pr_input, "QA pairs JSONL (labels optional)")->required();
    predict->add_option("--profiles", pr_profiles, "physician profiles JSONL");
    predict->add_option("--output", pr_output, "predictions JSONL path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("validation", e.what(), json_errors);
        return 1;
    }

    try {
        const auto build_config = [&](bool apply_overrides) {
            PipelineConfig cfg;
            if (!config_path.empty())
                cfg = pipeline::config_from_json(json::parse(read_text_file(config_path)));
            if (seed_opt->count() > 0) cfg.seed = seed;
            if (!apply_overrides) return cfg;
            if (!ov_featurizer.empty()) cfg.featurizer = pipeline::parse_featurizer(ov_featurizer);
            if (ov_non_textual != "\x01") detail::apply_non_textual(cfg, ov_non_textual);
            if (!ov_classifier.empty()) {
                if (ov_classifier == "logreg")
                    cfg.classifier = pipeline::Classifier::LogReg;
                else if (ov_classifier == "nb")
                    cfg.classifier = pipeline::Classifier::Nb;
                else
                    throw ValidationError("unknown classifier: " + ov_classifier);
            }
            if (ov_k > 0) cfg.k_folds = ov_k;
            if (ov_trials > 0) cfg.n_trials = ov_trials;
            if (ov_vocab > 0) {
                cfg.vocab_size = ov_vocab;
                if (!cfg.dbn_layout.empty()) cfg.dbn_layout[0] = ov_vocab;
            }
            if (ov_lda_k > 0) cfg.lda.k = ov_lda_k;
            if (ov_lda_iters > 0) cfg.lda.n_iterations = ov_lda_iters;
            if (!ov_dbn_layout.empty()) {
                cfg.dbn_layout.clear();
                for (const auto& part : split(ov_dbn_layout, ','))
                    cfg.dbn_layout.push_back(std::stoull(part));
            }
            if (ov_dbn_epochs > 0) cfg.dbn.n_epochs = ov_dbn_epochs;
            if (!ov_stopwords.empty()) cfg.stopword_path = ov_stopwords;
            if (!ov_domain.empty()) cfg.domain_path = ov_domain;
            if (!ov_keywords.empty()) cfg.keyword_path = ov_keywords;
            if (ov_collection != 0) cfg.collection_time = ov_collection;
            if (ov_launch != 0) cfg.launch_time = ov_launch;
            pipeline::validate(cfg);
            return cfg;
        };

        if (app.got_subcommand(ingest)) {
            IngestOptions opt;
            opt.input = in_input;
            opt.profiles = in_profiles;
            opt.out_dir = out_dir;
            opt.output_corpus = in_output;
            opt.min_chars = in_min_chars;
            opt.strict = strict;
            const json report = cmd_ingest(opt);
            std::cout << "kept " << report.at("n_kept") << " of " << report.at("n_loaded")
                      << " records\n";
        } else if (app.got_subcommand(synth)) {
            SynthOptions opt;
            opt.spec_path = sy_spec;
            if (seed_opt->count() > 0) opt.seed = seed;
            opt.out_dir = out_dir;
            const json meta = cmd_synth(opt);
            std::cout << "generated " << meta.at("n_high") << " high / " << meta.at("n_low")
                      << " low\n";
        } else if (app.got_subcommand(evaluate)) {
            ProtocolOptions opt{corpus_path, profiles_path, out_dir, strict};
            const auto cfg = build_config(true);
            const auto report = cmd_evaluate(opt, cfg);
            std::cout << render_report_text(report, cfg);
        } else if (app.got_subcommand(ablate)) {
            ProtocolOptions opt{corpus_path, profiles_path, out_dir, strict};
            const auto cfg = build_config(true);
            const auto result = cmd_ablate(opt, cfg);
            std::cout << render_ablate_text(result, cfg);
        } else if (app.got_subcommand(rank)) {
            RankOptions opt;
            opt.io = ProtocolOptions{corpus_path, profiles_path, out_dir, strict};
            opt.n_bins = rk_bins;
            opt.features_csv = rk_csv;
            opt.distributions = rk_dist;
            const auto cfg = build_config(true);
            const auto result = cmd_rank(opt, cfg);
            std::cout << render_rank_text(result, opt.n_bins);
        } else if (app.got_subcommand(train)) {
            TrainOptions opt;
            opt.io = ProtocolOptions{corpus_path, profiles_path, out_dir, strict};
            opt.model_dir = tr_model_dir;
            opt.with_eval = tr_eval;
            const auto cfg = build_config(true);
            const auto art = cmd_train(opt, cfg);
            std::cout << "model " << art.fingerprint << " written to " << tr_model_dir << "\n";
        } else if (app.got_subcommand(predict)) {
            PredictOptions opt;
            opt.model_dir = pr_model_dir;
            opt.input = pr_input;
            opt.profiles = pr_profiles;
            opt.output = pr_output;
            opt.out_dir = out_dir;
            opt.strict = strict;
            const auto predictions = cmd_predict(opt);
            std::cout << "scored " << predictions.size() << " record(s)\n";
        }
        return 0;
    } catch (const ValidationError& e) {
        emit_error("validation", e.what(), json_errors);
        return 1;
    } catch (const std::exception& e) {
        emit_error("runtime", e.what(), json_errors);
        return 2;
    }
}

}  // namespace hqa::cli
