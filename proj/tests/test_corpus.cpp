#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "hqa/corpus.hpp"

using namespace hqa;
using namespace hqa::corpus;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    const fs::path dir = fs::temp_directory_path() / "hqa_corpus_test";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    write_text_file_atomic(p, content);
    return p;
}

std::string qa_line(const std::string& id, const std::string& label, const std::string& answer,
                    std::int64_t qt = 1000, std::int64_t at = 2000) {
    nlohmann::json j;
    j["id"] = id;
    j["question"] = "why " + id;
    j["answer"] = answer;
    if (!label.empty()) j["label"] = label;
    j["physician_id"] = "p_" + id;
    j["question_time"] = qt;
    j["answer_time"] = at;
    return j.dump() + "\n";
}

}  // namespace

TEST_CASE("load_corpus parses well-formed lines with no rejects") {
    const auto p = write_temp("ok.jsonl",
                              qa_line("a", "high", "x") + qa_line("b", "low", "y") +
                                  qa_line("c", "high", "z"));
    const auto r = load_corpus(p);
    CHECK(r.corpus.pairs.size() == 3);
    CHECK(r.rejects.empty());
    CHECK(r.corpus.pairs[1].label == Label::Low);
}

TEST_CASE("load_corpus rejects a line missing its label, with the line number") {
    const auto p = write_temp("missing_label.jsonl",
                              qa_line("a", "high", "x") + qa_line("b", "", "y") +
                                  qa_line("c", "low", "z"));
    const auto r = load_corpus(p);
    CHECK(r.corpus.pairs.size() == 2);
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects[0].line_no == 2);
}

TEST_CASE("load_corpus accepts an empty file as an empty corpus") {
    const auto p = write_temp("empty.jsonl", "");
    const auto r = load_corpus(p);
    CHECK(r.corpus.pairs.empty());
    CHECK(r.rejects.empty());
}

TEST_CASE("load_corpus rejects duplicates, bad labels, and inverted times") {
    const auto p = write_temp("bad.jsonl", qa_line("a", "high", "x") +
                                               qa_line("a", "low", "dup") +
                                               qa_line("b", "medium", "lbl") +
                                               qa_line("c", "high", "time", 2000, 1000));
    const auto r = load_corpus(p);
    CHECK(r.corpus.pairs.size() == 1);
    REQUIRE(r.rejects.size() == 3);
    std::set<std::size_t> lines;
    for (const auto& rej : r.rejects) lines.insert(rej.line_no);
    CHECK(lines == std::set<std::size_t>{2, 3, 4});
}

TEST_CASE("load_corpus without labels keeps unlabeled records for scoring") {
    const auto p = write_temp("nolabel.jsonl", qa_line("a", "", "x") + qa_line("b", "high", "y"));
    const auto r = load_corpus(p, /*require_labels=*/false);
    REQUIRE(r.corpus.pairs.size() == 2);
    CHECK_FALSE(r.corpus.pairs[0].label.has_value());
    CHECK(r.corpus.pairs[1].label == Label::High);
    CHECK_THROWS_AS(require_labels(r.corpus), ValidationError);
}

TEST_CASE("filter_min_answer_length counts unicode scalars") {
    Corpus c;
    QaPair qa;
    qa.question_time = 0;
    qa.answer_time = 1;
    qa.label = Label::High;
    qa.id = "a14";
    qa.answer_text = std::string(14, 'x');
    c.pairs.push_back(qa);
    qa.id = "a15";
    qa.answer_text = std::string(15, 'x');
    c.pairs.push_back(qa);
    qa.id = "cjk15";
    qa.answer_text.clear();
    for (int i = 0; i < 15; ++i) append_utf8(0x75C5, qa.answer_text);  // 45 bytes, 15 chars
    c.pairs.push_back(qa);

    const auto kept = filter_min_answer_length(c, 15);
    REQUIRE(kept.pairs.size() == 2);
    CHECK(kept.pairs[0].id == "a15");
    CHECK(kept.pairs[1].id == "cjk15");
    CHECK(filter_min_answer_length(c, 0).pairs.size() == 3);
}

TEST_CASE("filter_min_answer_length on mixed lengths keeps the long ones") {
    Corpus c;
    for (const auto& [id, len] : std::vector<std::pair<std::string, int>>{
             {"s3", 3}, {"s20", 20}, {"s40", 40}}) {
        QaPair qa;
        qa.id = id;
        qa.answer_text = std::string(static_cast<std::size_t>(len), 'y');
        qa.label = Label::Low;
        qa.question_time = 0;
        qa.answer_time = 0;
        c.pairs.push_back(qa);
    }
    CHECK(filter_min_answer_length(c, 15).pairs.size() == 2);
}

namespace {

Corpus tiny_corpus(std::size_t n_high, std::size_t n_low) {
    Corpus c;
    for (std::size_t i = 0; i < n_high + n_low; ++i) {
        QaPair qa;
        qa.id = "q" + std::to_string(i);
        qa.answer_text = "text";
        qa.label = i < n_high ? Label::High : Label::Low;
        qa.question_time = 0;
        qa.answer_time = 1;
        c.pairs.push_back(qa);
    }
    return c;
}

}  // namespace

TEST_CASE("balanced_sample draws the exact class histogram deterministically") {
    const Corpus c = tiny_corpus(30, 12);
    const Corpus s1 = balanced_sample(c, 10, 99);
    const Corpus s2 = balanced_sample(c, 10, 99);
    CHECK(s1.count_label(Label::High) == 10);
    CHECK(s1.count_label(Label::Low) == 10);
    std::multiset<std::string> ids1, ids2;
    for (const auto& qa : s1.pairs) ids1.insert(qa.id);
    for (const auto& qa : s2.pairs) ids2.insert(qa.id);
    CHECK(ids1 == ids2);
    CHECK(ids1.size() == 20);
    CHECK(balanced_sample(c, 0, 1).pairs.empty());
}

TEST_CASE("balanced_sample names the deficient class and its counts") {
    const Corpus c = tiny_corpus(30, 3);
    CHECK_THROWS_WITH(balanced_sample(c, 10, 1),
                      Catch::Matchers::ContainsSubstring("low") &&
                          Catch::Matchers::ContainsSubstring("3") &&
                          Catch::Matchers::ContainsSubstring("10"));
}

namespace {

// fold -> {n_high, n_low}
std::map<std::size_t, std::pair<std::size_t, std::size_t>> fold_histogram(const Corpus& c,
                                                                          const FoldPlan& plan) {
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> h;
    for (const auto& qa : c.pairs) {
        auto& cell = h[plan.assignments.at(qa.id)];
        (qa.label == Label::High ? cell.first : cell.second) += 1;
    }
    return h;
}

}  // namespace

TEST_CASE("make_folds on 10 pairs (5/5) with k=5 gives five 1/1 folds") {
    const Corpus c = tiny_corpus(5, 5);
    const auto plan = make_folds(c, 5, 7);
    const auto h = fold_histogram(c, plan);
    REQUIRE(h.size() == 5);
    for (const auto& [fold, counts] : h) {
        CHECK(counts.first == 1);
        CHECK(counts.second == 1);
    }
}

TEST_CASE("make_folds k=2 on 4 pairs (2/2) gives two folds of 2") {
    const Corpus c = tiny_corpus(2, 2);
    const auto h = fold_histogram(c, make_folds(c, 2, 7));
    REQUIRE(h.size() == 2);
    for (const auto& [fold, counts] : h) CHECK(counts.first + counts.second == 2);
}

TEST_CASE("make_folds at protocol scale gives five 320/320 folds") {
    const Corpus c = tiny_corpus(1600, 1600);
    const auto h = fold_histogram(c, make_folds(c, 5, 7));
    REQUIRE(h.size() == 5);
    for (const auto& [fold, counts] : h) {
        CHECK(counts.first == 320);
        CHECK(counts.second == 320);
    }
}

TEST_CASE("make_folds stays within one per class and overall on uneven input") {
    const Corpus c = tiny_corpus(7, 5);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto plan = make_folds(c, 3, seed);
        const auto h = fold_histogram(c, plan);
        std::size_t hi_min = 99, hi_max = 0, lo_min = 99, lo_max = 0, tot_min = 99, tot_max = 0;
        for (const auto& [fold, counts] : h) {
            hi_min = std::min(hi_min, counts.first);
            hi_max = std::max(hi_max, counts.first);
            lo_min = std::min(lo_min, counts.second);
            lo_max = std::max(lo_max, counts.second);
            tot_min = std::min(tot_min, counts.first + counts.second);
            tot_max = std::max(tot_max, counts.first + counts.second);
        }
        CHECK(hi_max - hi_min <= 1);
        CHECK(lo_max - lo_min <= 1);
        CHECK(tot_max - tot_min <= 1);
    }
}

TEST_CASE("split_fold partitions the corpus exactly") {
    const Corpus c = tiny_corpus(6, 6);
    const auto plan = make_folds(c, 3, 5);
    const auto [train, test] = split_fold(c, plan, 1);
    CHECK(train.pairs.size() + test.pairs.size() == c.pairs.size());
    std::set<std::string> seen;
    for (const auto& qa : train.pairs) seen.insert(qa.id);
    for (const auto& qa : test.pairs) {
        CHECK(seen.count(qa.id) == 0);
        seen.insert(qa.id);
    }
    CHECK(seen.size() == c.pairs.size());
}

TEST_CASE("make_folds rejects k beyond the smallest class") {
    const Corpus c = tiny_corpus(10, 3);
    CHECK_THROWS_AS(make_folds(c, 4, 1), ValidationError);
    CHECK_THROWS_AS(make_folds(c, 1, 1), ValidationError);
}

TEST_CASE("generate_synthetic produces the documented class mix deterministically") {
    SynthSpec spec;  // defaults: 890 high, 110 low
    const auto r1 = generate_synthetic(spec, 5);
    const auto r2 = generate_synthetic(spec, 5);
    CHECK(r1.corpus.count_label(Label::High) == 890);
    CHECK(r1.corpus.count_label(Label::Low) == 110);
    CHECK(corpus_to_jsonl(r1.corpus) == corpus_to_jsonl(r2.corpus));
    CHECK(profiles_to_jsonl(r1.corpus) == profiles_to_jsonl(r2.corpus));
    const auto r3 = generate_synthetic(spec, 6);
    CHECK(corpus_to_jsonl(r1.corpus) != corpus_to_jsonl(r3.corpus));
}

TEST_CASE("generate_synthetic with empty spec gives an empty corpus") {
    SynthSpec spec;
    spec.n_high = 0;
    spec.n_low = 0;
    const auto r = generate_synthetic(spec, 1);
    CHECK(r.corpus.pairs.empty());
    CHECK(corpus_to_jsonl(r.corpus).empty());
}

TEST_CASE("parse_synth_spec validates fields") {
    CHECK_THROWS_AS(parse_synth_spec(nlohmann::json{{"overlap_signal", 1.5}}), ValidationError);
    CHECK_THROWS_AS(parse_synth_spec(nlohmann::json{{"n_high", -3}}), ValidationError);
    CHECK_THROWS_AS(parse_synth_spec(nlohmann::json{{"mystery", 1}}), ValidationError);
    const auto s = parse_synth_spec(nlohmann::json{{"n_high", 12}, {"seed", 9}});
    CHECK(s.n_high == 12);
    CHECK(s.n_low == 110);
    CHECK(s.seed_set);
    CHECK(s.seed == 9);
}

TEST_CASE("zero-signal generation is label-blind in answer length") {
    SynthSpec spec;
    spec.n_high = 600;
    spec.n_low = 600;
    spec.overlap_signal = spec.domain_signal = spec.length_signal = 0.0;
    spec.gap_signal = spec.profile_signal = 0.0;
    const auto r = generate_synthetic(spec, 3);
    double hi_sum = 0, lo_sum = 0;
    for (const auto& qa : r.corpus.pairs) {
        const double len = static_cast<double>(qa.answer_text.size());
        (qa.label == Label::High ? hi_sum : lo_sum) += len;
    }
    const double hi_mean = hi_sum / 600.0, lo_mean = lo_sum / 600.0;
    CHECK(std::fabs(hi_mean - lo_mean) / hi_mean < 0.10);
}

TEST_CASE("corpus jsonl round-trips") {
    SynthSpec spec;
    spec.n_high = 20;
    spec.n_low = 20;
    const auto r = generate_synthetic(spec, 4);
    const auto p = write_temp("round.jsonl", corpus_to_jsonl(r.corpus));
    const auto back = load_corpus(p);
    REQUIRE(back.rejects.empty());
    REQUIRE(back.corpus.pairs.size() == r.corpus.pairs.size());
    CHECK(corpus_to_jsonl(back.corpus) == corpus_to_jsonl(r.corpus));

    const auto pp = write_temp("round_profiles.jsonl", profiles_to_jsonl(r.corpus));
    Corpus with_profiles = back.corpus;
    load_profiles(pp, with_profiles);
    CHECK(profiles_to_jsonl(with_profiles) == profiles_to_jsonl(r.corpus));
}

TEST_CASE("load_profiles validates attribute kinds") {
    const auto corpus_path = write_temp("prof_corpus.jsonl", qa_line("a", "high", "x"));
    auto loaded = load_corpus(corpus_path);
    const std::string good =
        nlohmann::json{{"physician_id", "p_a"}, {"service_rating", 0.5}, {"thank_letters", 3}}
            .dump() +
        "\n";
    const std::string bad_fraction =
        nlohmann::json{{"physician_id", "p_b"}, {"service_rating", 1.5}}.dump() + "\n";
    const std::string bad_ordinal =
        nlohmann::json{{"physician_id", "p_c"}, {"physician_grade", 9}}.dump() + "\n";
    const std::string bad_count =
        nlohmann::json{{"physician_id", "p_d"}, {"gift_count", -2}}.dump() + "\n";
    const auto p = write_temp("profiles.jsonl", good + bad_fraction + bad_ordinal + bad_count);
    std::vector<Reject> rejects;
    load_profiles(p, loaded.corpus, &rejects);
    CHECK(loaded.corpus.profiles.count("p_a") == 1);
    CHECK(rejects.size() == 3);
    const auto* prof = loaded.corpus.profile_for(loaded.corpus.pairs[0]);
    REQUIRE(prof != nullptr);
    CHECK(*prof->get("service_rating") == 0.5);
    CHECK(*prof->get("thank_letters") == 3.0);
    CHECK_FALSE(prof->get("gift_count").has_value());
}

TEST_CASE("profile catalogue covers sf2..sf26 exactly once") {
    const auto& specs = profile_attributes();
    REQUIRE(specs.size() == 25);
    std::set<int> indices;
    for (const auto& s : specs) indices.insert(s.sf_index);
    CHECK(indices.size() == 25);
    CHECK(*indices.begin() == 2);
    CHECK(*indices.rbegin() == 26);
}

TEST_CASE("reference time fallbacks derive from the data") {
    SynthSpec spec;
    spec.n_high = 5;
    spec.n_low = 5;
    const auto r = generate_synthetic(spec, 8);
    Corpus c = r.corpus;
    REQUIRE(c.meta.collection_time.has_value());
    const std::int64_t stamped = *c.meta.collection_time;
    c.meta.collection_time.reset();
    c.meta.launch_time.reset();
    std::int64_t max_at = 0;
    for (const auto& qa : c.pairs) max_at = std::max(max_at, qa.answer_time);
    CHECK(c.effective_collection_time() == max_at);
    CHECK(max_at <= stamped);
    std::int64_t min_join = std::numeric_limits<std::int64_t>::max();
    for (const auto& [id, prof] : c.profiles) {
        const auto j = prof.get("joining_time");
        if (j) min_join = std::min(min_join, static_cast<std::int64_t>(*j));
    }
    CHECK(c.effective_launch_time() == min_join);
}
