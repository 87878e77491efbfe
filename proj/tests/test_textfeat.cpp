#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "hqa/textfeat.hpp"
#include "oracles.hpp"

using namespace hqa;
using namespace hqa::textfeat;
using Catch::Matchers::WithinAbs;

namespace {

corpus::Corpus doc_corpus(const std::vector<std::pair<std::string, corpus::Label>>& docs) {
    corpus::Corpus c;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        corpus::QaPair qa;
        qa.id = "d" + std::to_string(i);
        qa.answer_text = docs[i].first;
        qa.label = docs[i].second;
        c.pairs.push_back(qa);
    }
    return c;
}

Vocabulary hand_vocab(std::vector<std::string> terms, std::size_t n_docs = 0,
                      std::vector<std::size_t> doc_freq = {}) {
    Vocabulary v;
    v.terms = std::move(terms);
    v.doc_freq = doc_freq.empty() ? std::vector<std::size_t>(v.terms.size(), 1)
                                  : std::move(doc_freq);
    v.n_docs = n_docs;
    v.rebuild_index();
    return v;
}

}  // namespace

TEST_CASE("tokenize folds case and splits on punctuation") {
    TokenizerConfig cfg;
    CHECK(tokenize("High blood pressure!", cfg) ==
          std::vector<std::string>{"high", "blood", "pressure"});
    CHECK(tokenize("take 2mg, twice-daily.", cfg) ==
          std::vector<std::string>{"take", "2mg", "twice", "daily"});
    CHECK(tokenize("", cfg).empty());
    cfg.lowercase = false;
    CHECK(tokenize("High blood", cfg) == std::vector<std::string>{"High", "blood"});
}

TEST_CASE("tokenize emits CJK ideographs as single-character tokens") {
    TokenizerConfig cfg;
    std::string text;
    append_utf8(0x9AD8, text);  // three ideographs, no separators
    append_utf8(0x8840, text);
    append_utf8(0x538B, text);
    const auto toks = tokenize(text, cfg);
    REQUIRE(toks.size() == 3);
    CHECK(count_codepoints(toks[0]) == 1);

    std::string mixed = "bp";
    append_utf8(0x9AD8, mixed);
    mixed += "now";
    CHECK(tokenize(mixed, cfg).size() == 3);  // latin run, ideograph, latin run
}

TEST_CASE("tokenize drops stopwords after folding") {
    TokenizerConfig cfg;
    auto sw = std::make_shared<std::unordered_set<std::string>>();
    sw->insert("a");
    sw->insert("of");
    sw->insert("the");
    cfg.stopwords = sw;
    CHECK(tokenize("a of the pain", cfg) == std::vector<std::string>{"pain"});
    CHECK(tokenize("The pain of A rash", cfg) == std::vector<std::string>{"pain", "rash"});
}

TEST_CASE("whitespace and pretokenized modes split on blank runs only") {
    TokenizerConfig cfg;
    cfg.mode = TokenizerMode::Whitespace;
    CHECK(tokenize("Take 2mg, twice-daily.", cfg) ==
          std::vector<std::string>{"take", "2mg,", "twice-daily."});
    cfg.mode = TokenizerMode::Pretokenized;
    CHECK(tokenize("Take 2mg, twice-daily.", cfg) ==
          std::vector<std::string>{"Take", "2mg,", "twice-daily."});
    CHECK(tokenize("a\tb\nc  d", cfg) == std::vector<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("build_vocabulary keeps the most frequent terms, ties lexicographic") {
    // b:5 a:5 c:2 collection frequency; size 2 keeps {a,b}.
    const auto c = doc_corpus({
        {"a a a b b b", corpus::Label::High},
        {"a a b b c c", corpus::Label::Low},
    });
    TokenizerConfig cfg;
    const auto v = build_vocabulary(c, 2, cfg);
    CHECK(v.terms == std::vector<std::string>{"a", "b"});
    CHECK(v.n_docs == 2);
    CHECK(v.doc_freq == std::vector<std::size_t>{2, 2});

    const auto all = build_vocabulary(c, 10, cfg);
    CHECK(all.terms == std::vector<std::string>{"a", "b", "c"});
    CHECK_THROWS_AS(build_vocabulary(corpus::Corpus{}, 2, cfg), ValidationError);
    CHECK_THROWS_AS(build_vocabulary(c, 0, cfg), ValidationError);
}

TEST_CASE("encode_binary marks vocabulary presence once") {
    const auto v = hand_vocab({"pain", "fever", "rash"});
    TokenizerConfig cfg;
    const auto sv = encode_binary("fever and fever", v, cfg);
    CHECK(sv.dim == 3);
    CHECK(sv.indices == std::vector<std::size_t>{1});
    CHECK(sv.values == std::vector<double>{1.0});
    const auto none = encode_binary("nothing known", v, cfg);
    CHECK(none.indices.empty());
    CHECK(none.dim == 3);
}

TEST_CASE("encode_tfidf weights by raw tf times ln(N/df)") {
    const auto v = hand_vocab({"common", "fever"}, /*n_docs=*/10, /*doc_freq=*/{10, 1});
    TokenizerConfig cfg;
    const auto sv = encode_tfidf("fever common fever", v, cfg);
    // df == n_docs gives idf 0 and the term is dropped.
    REQUIRE(sv.indices == std::vector<std::size_t>{1});
    CHECK_THAT(sv.values[0], WithinAbs(4.605170185988092, 1e-12));  // 2 * ln(10)
}

TEST_CASE("chi_tfidf_vocabulary ranks class-separating terms first") {
    // "marker" in all 10 high docs, none of 10 low; "everywhere" in all 20;
    // "fill##" words are unique one-doc terms.
    std::vector<std::pair<std::string, corpus::Label>> docs;
    for (int i = 0; i < 10; ++i)
        docs.push_back({"marker everywhere fill" + std::to_string(i), corpus::Label::High});
    for (int i = 10; i < 20; ++i)
        docs.push_back({"everywhere fill" + std::to_string(i), corpus::Label::Low});
    const auto c = doc_corpus(docs);
    TokenizerConfig cfg;

    const auto top1 = chi_tfidf_vocabulary(c, 1, cfg);
    CHECK(top1.terms == std::vector<std::string>{"marker"});
    CHECK(chi2_2x2(10, 0, 0, 10) == 20.0);
    CHECK(chi2_2x2(10, 10, 0, 0) == 0.0);  // equal presence in both classes

    // Per-term scores match the generic contingency oracle.
    const auto ts = textfeat::detail::collect_term_stats(c, cfg);
    for (const auto& [term, row] : ts.stats) {
        const double a = static_cast<double>(row[2]);
        const double b = static_cast<double>(row[3]);
        const double got = chi2_2x2(a, b, 10.0 - a, 10.0 - b);
        const double want = oracle::chi2_table({{a, b}, {10.0 - a, 10.0 - b}});
        CHECK_THAT(got, WithinAbs(want, 1e-9));
    }

    CHECK_THROWS_AS(chi_tfidf_vocabulary(doc_corpus({{"x", corpus::Label::High}}), 1, cfg),
                    ValidationError);
}

TEST_CASE("vocabulary json round-trips") {
    const auto c = doc_corpus({
        {"alpha beta beta", corpus::Label::High},
        {"beta gamma", corpus::Label::Low},
    });
    TokenizerConfig cfg;
    const auto v = build_vocabulary(c, 3, cfg);
    const auto back = vocabulary_from_json(vocabulary_to_json(v));
    CHECK(back.terms == v.terms);
    CHECK(back.doc_freq == v.doc_freq);
    CHECK(back.n_docs == v.n_docs);
    CHECK(back.selection == v.selection);
    CHECK(back.index.at("beta") == v.index.at("beta"));
    CHECK_THROWS_AS(vocabulary_from_json(json::object()), ValidationError);
}
