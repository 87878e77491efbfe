#pragma once

// Latent Dirichlet allocation by collapsed Gibbs sampling. Fitting sweeps
// token-topic assignments over the training answers; inference freezes the
// topic-word counts and samples only the new document's assignments. The
// document vector is the smoothed topic distribution from the final sweep.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hqa/corpus.hpp"
#include "hqa/matrix.hpp"
#include "hqa/rng.hpp"
#include "hqa/textfeat.hpp"
#include "hqa/util.hpp"

namespace hqa::topicmodel {

using corpus::Corpus;
using json = nlohmann::json;
using textfeat::TokenizerConfig;
using textfeat::Vocabulary;

struct TopicModel {
    std::size_t K = 0;
    double alpha = 0.0;  // symmetric document-topic prior
    double beta = 0.0;   // symmetric topic-word prior
    std::vector<std::vector<std::int64_t>> topic_word_counts;  // K x V
    std::vector<std::int64_t> topic_totals;                    // tokens assigned per topic
    Vocabulary vocabulary;
    std::uint64_t seed = 0;
    std::size_t n_iterations = 0;
};

namespace detail {

inline std::vector<std::vector<std::size_t>> to_word_ids(const Corpus& train,
                                                          const Vocabulary& vocab,
                                                          const TokenizerConfig& cfg) {
    std::vector<std::vector<std::size_t>> docs;
    docs.reserve(train.pairs.size());
    for (const auto& qa : train.pairs) {
        std::vector<std::size_t> ids;
        for (const auto& t : textfeat::tokenize(qa.answer_text, cfg)) {
            auto it = vocab.index.find(t);
            if (it != vocab.index.end()) ids.push_back(it->second);
        }
        docs.push_back(std::move(ids));
    }
    return docs;
}

// Vocabulary over every distinct training answer token, lexicographic order.
inline Vocabulary full_vocabulary(const Corpus& train, const TokenizerConfig& cfg) {
    std::map<std::string, std::size_t> df;
    for (const auto& qa : train.pairs) {
        std::set<std::string> seen;
        for (const auto& t : textfeat::tokenize(qa.answer_text, cfg)) seen.insert(t);
        for (const auto& t : seen) df[t]++;
    }
    Vocabulary v;
    v.selection = textfeat::Selection::Frequency;
    v.n_docs = train.pairs.size();
    for (const auto& [term, freq] : df) {
        v.terms.push_back(term);
        v.doc_freq.push_back(freq);
    }
    v.rebuild_index();
    return v;
}

}  // namespace detail

// Defaults when the caller passes alpha <= 0: the usual 50/K heuristic;
// beta <= 0 falls back to 0.01.
inline TopicModel fit_lda(const Corpus& train, std::size_t k, double alpha, double beta,
                          std::size_t n_iterations, std::uint64_t seed,
                          const TokenizerConfig& cfg) {
    if (k < 2) throw ValidationError("fit_lda: K must be at least 2");
    TopicModel m;
    m.K = k;
    m.alpha = alpha > 0 ? alpha : 50.0 / static_cast<double>(k);
    m.beta = beta > 0 ? beta : 0.01;
    m.seed = seed;
    m.n_iterations = n_iterations;
    m.vocabulary = detail::full_vocabulary(train, cfg);
    const std::size_t v_size = m.vocabulary.size();
    const auto docs = detail::to_word_ids(train, m.vocabulary, cfg);
    std::size_t total_tokens = 0;
    for (const auto& d : docs) total_tokens += d.size();
    if (total_tokens == 0) throw ValidationError("fit_lda: no usable tokens in training answers");

    m.topic_word_counts.assign(k, std::vector<std::int64_t>(v_size, 0));
    m.topic_totals.assign(k, 0);
    std::vector<std::vector<std::int64_t>> doc_topic(docs.size(),
                                                     std::vector<std::int64_t>(k, 0));
    std::vector<std::vector<std::size_t>> z(docs.size());

    Rng rng(derive_seed(seed, "lda_fit"));
    for (std::size_t d = 0; d < docs.size(); ++d) {
        z[d].resize(docs[d].size());
        for (std::size_t t = 0; t < docs[d].size(); ++t) {
            const std::size_t topic = static_cast<std::size_t>(rng.below(k));
            z[d][t] = topic;
            doc_topic[d][topic]++;
            m.topic_word_counts[topic][docs[d][t]]++;
            m.topic_totals[topic]++;
        }
    }

    const double v_beta = static_cast<double>(v_size) * m.beta;
    std::vector<double> cumulative(k);
    for (std::size_t sweep = 0; sweep < n_iterations; ++sweep) {
        for (std::size_t d = 0; d < docs.size(); ++d) {
            for (std::size_t t = 0; t < docs[d].size(); ++t) {
                const std::size_t w = docs[d][t];
                const std::size_t old_topic = z[d][t];
                doc_topic[d][old_topic]--;
                m.topic_word_counts[old_topic][w]--;
                m.topic_totals[old_topic]--;
                double total = 0.0;
                for (std::size_t topic = 0; topic < k; ++topic) {
                    const double p =
                        (static_cast<double>(doc_topic[d][topic]) + m.alpha) *
                        (static_cast<double>(m.topic_word_counts[topic][w]) + m.beta) /
                        (static_cast<double>(m.topic_totals[topic]) + v_beta);
                    total += p;
                    cumulative[topic] = total;
                }
                const double u = rng.uniform01() * total;
                std::size_t new_topic = 0;
                while (new_topic + 1 < k && cumulative[new_topic] <= u) ++new_topic;
                z[d][t] = new_topic;
                doc_topic[d][new_topic]++;
                m.topic_word_counts[new_topic][w]++;
                m.topic_totals[new_topic]++;
            }
        }
    }
    return m;
}

// Gibbs inference with the model's topic-word counts frozen. Returns the
// smoothed document-topic distribution; an all-unknown answer yields the
// uniform prior.
inline std::vector<double> infer_topics(std::string_view answer, const TopicModel& m,
                                        std::size_t n_infer_iterations, std::uint64_t seed,
                                        const TokenizerConfig& cfg) {
    std::vector<std::size_t> ids;
    for (const auto& t : textfeat::tokenize(answer, cfg)) {
        auto it = m.vocabulary.index.find(t);
        if (it != m.vocabulary.index.end()) ids.push_back(it->second);
    }
    const std::size_t k = m.K;
    std::vector<std::int64_t> doc_topic(k, 0);
    std::vector<std::size_t> z(ids.size());
    Rng rng(derive_seed(seed, "lda_infer"));
    for (std::size_t t = 0; t < ids.size(); ++t) {
        const std::size_t topic = static_cast<std::size_t>(rng.below(k));
        z[t] = topic;
        doc_topic[topic]++;
    }
    const double v_beta = static_cast<double>(m.vocabulary.size()) * m.beta;
    std::vector<double> cumulative(k);
    for (std::size_t sweep = 0; sweep < n_infer_iterations; ++sweep) {
        for (std::size_t t = 0; t < ids.size(); ++t) {
            const std::size_t w = ids[t];
            doc_topic[z[t]]--;
            double total = 0.0;
            for (std::size_t topic = 0; topic < k; ++topic) {
                const double p = (static_cast<double>(doc_topic[topic]) + m.alpha) *
                                 (static_cast<double>(m.topic_word_counts[topic][w]) + m.beta) /
                                 (static_cast<double>(m.topic_totals[topic]) + v_beta);
                total += p;
                cumulative[topic] = total;
            }
            const double u = rng.uniform01() * total;
            std::size_t new_topic = 0;
            while (new_topic + 1 < k && cumulative[new_topic] <= u) ++new_topic;
            z[t] = new_topic;
            doc_topic[new_topic]++;
        }
    }
    std::vector<double> theta(k);
    const double denom = static_cast<double>(ids.size()) + static_cast<double>(k) * m.alpha;
    for (std::size_t topic = 0; topic < k; ++topic)
        theta[topic] = (static_cast<double>(doc_topic[topic]) + m.alpha) / denom;
    return theta;
}

inline json topic_model_to_json(const TopicModel& m) {
    json j;
    j["K"] = m.K;
    j["alpha"] = m.alpha;
    j["beta"] = m.beta;
    j["vocabulary"] = textfeat::vocabulary_to_json(m.vocabulary);
    j["topic_word_counts"] = m.topic_word_counts;
    j["seed"] = m.seed;
    j["n_iterations"] = m.n_iterations;
    return j;
}

inline TopicModel topic_model_from_json(const json& j) {
    TopicModel m;
    m.K = j.at("K").get<std::size_t>();
    m.alpha = j.at("alpha").get<double>();
    m.beta = j.at("beta").get<double>();
    m.vocabulary = textfeat::vocabulary_from_json(j.at("vocabulary"));
    m.topic_word_counts = j.at("topic_word_counts").get<std::vector<std::vector<std::int64_t>>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.n_iterations = j.at("n_iterations").get<std::size_t>();
    if (m.topic_word_counts.size() != m.K)
        throw ValidationError("topic model: K does not match topic_word_counts");
    m.topic_totals.assign(m.K, 0);
    for (std::size_t topic = 0; topic < m.K; ++topic) {
        if (m.topic_word_counts[topic].size() != m.vocabulary.size())
            throw ValidationError("topic model: vocabulary size mismatch");
        for (std::int64_t c : m.topic_word_counts[topic]) m.topic_totals[topic] += c;
    }
    return m;
}

}  // namespace hqa::topicmodel
