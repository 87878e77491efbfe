#pragma once

// Classifiers and the evaluation toolkit: L2 logistic regression trained by
// full-batch gradient descent with halving backtracking, Gaussian naive
// Bayes, P/R/F1, rank-based AUC, chi-squared feature ranking over
// equal-frequency bins, the ten-group distribution report, and the paired
// two-tailed t-test. Labels are ints with 1 as the positive (high) class.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "hqa/rng.hpp"
#include "hqa/util.hpp"

namespace hqa::learner {

using json = nlohmann::json;

using Rows = std::vector<std::vector<double>>;

namespace detail {

inline void check_xy(const Rows& x, const std::vector<int>& y) {
    if (x.empty()) throw ValidationError("empty feature matrix");
    if (x.size() != y.size()) throw ValidationError("feature/label row count mismatch");
    const std::size_t dim = x[0].size();
    for (const auto& r : x) {
        if (r.size() != dim) throw ValidationError("ragged feature matrix");
        for (double v : r)
            if (!std::isfinite(v)) throw ValidationError("non-finite feature value");
    }
    bool has_pos = false, has_neg = false;
    for (int v : y) (v == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw ValidationError("training labels contain a single class");
}

inline double softplus(double z) {
    if (z > 35.0) return z;
    if (z < -35.0) return 0.0;
    return std::log1p(std::exp(z));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Logistic regression

struct LogRegModel {
    std::vector<double> weights;
    double bias = 0.0;
    double l2 = 0.0;
    std::vector<double> loss_log;  // non-increasing by construction

    double raw_score(const std::vector<double>& x) const {
        if (x.size() != weights.size()) throw ValidationError("predict: dim mismatch");
        double z = bias;
        for (std::size_t j = 0; j < x.size(); ++j) z += weights[j] * x[j];
        return z;
    }
};

struct LogRegConfig {
    double l2 = 1e-4;
    double learning_rate = 0.1;
    std::size_t n_iterations = 2000;
    std::uint64_t seed = 0;  // reserved; the optimizer is deterministic from zero init
};

namespace detail {

struct LossGrad {
    double loss;
    std::vector<double> grad_w;
    double grad_b;
};

// Mean log-loss plus (l2/2)|w|^2; the bias is never regularized.
inline double logreg_loss(const Rows& x, const std::vector<int>& y,
                          const std::vector<double>& w, double b, double l2) {
    double loss = 0.0;
    for (std::size_t r = 0; r < x.size(); ++r) {
        double z = b;
        const auto& row = x[r];
        for (std::size_t j = 0; j < row.size(); ++j) z += w[j] * row[j];
        loss += softplus(z) - (y[r] == 1 ? z : 0.0);
    }
    loss /= static_cast<double>(x.size());
    double reg = 0.0;
    for (double v : w) reg += v * v;
    return loss + 0.5 * l2 * reg;
}

inline LossGrad logreg_loss_grad(const Rows& x, const std::vector<int>& y,
                                 const std::vector<double>& w, double b, double l2) {
    LossGrad out;
    out.grad_w.assign(w.size(), 0.0);
    out.grad_b = 0.0;
    out.loss = 0.0;
    for (std::size_t r = 0; r < x.size(); ++r) {
        double z = b;
        const auto& row = x[r];
        for (std::size_t j = 0; j < row.size(); ++j) z += w[j] * row[j];
        const double p = 1.0 / (1.0 + std::exp(-z));
        const double err = p - (y[r] == 1 ? 1.0 : 0.0);
        for (std::size_t j = 0; j < row.size(); ++j) out.grad_w[j] += err * row[j];
        out.grad_b += err;
        out.loss += softplus(z) - (y[r] == 1 ? z : 0.0);
    }
    const double n = static_cast<double>(x.size());
    out.loss /= n;
    out.grad_b /= n;
    double reg = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        out.grad_w[j] = out.grad_w[j] / n + l2 * w[j];
        reg += w[j] * w[j];
    }
    out.loss += 0.5 * l2 * reg;
    return out;
}

}  // namespace detail

// Full-batch gradient descent from zero init. A step that would raise the
// loss is retried with a halved rate, so the logged loss never increases.
inline LogRegModel train_logreg(const Rows& x, const std::vector<int>& y,
                                const LogRegConfig& cfg = {}) {
    detail::check_xy(x, y);
    if (cfg.learning_rate <= 0) throw ValidationError("learning_rate must be positive");
    LogRegModel m;
    m.l2 = cfg.l2;
    m.weights.assign(x[0].size(), 0.0);
    m.bias = 0.0;
    double step = cfg.learning_rate;
    auto lg = detail::logreg_loss_grad(x, y, m.weights, m.bias, cfg.l2);
    m.loss_log.push_back(lg.loss);
    for (std::size_t it = 0; it < cfg.n_iterations; ++it) {
        double grad_inf = std::abs(lg.grad_b);
        for (double g : lg.grad_w) grad_inf = std::max(grad_inf, std::abs(g));
        if (grad_inf < 1e-12) break;
        std::vector<double> w_next(m.weights.size());
        double b_next = 0.0;
        double loss_next = 0.0;
        bool accepted = false;
        while (step >= 1e-18) {
            for (std::size_t j = 0; j < w_next.size(); ++j)
                w_next[j] = m.weights[j] - step * lg.grad_w[j];
            b_next = m.bias - step * lg.grad_b;
            loss_next = detail::logreg_loss(x, y, w_next, b_next, cfg.l2);
            if (loss_next <= lg.loss) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no descent direction at representable step sizes
        m.weights = std::move(w_next);
        m.bias = b_next;
        lg = detail::logreg_loss_grad(x, y, m.weights, m.bias, cfg.l2);
        m.loss_log.push_back(std::min(loss_next, lg.loss));
        step = std::min(step * 1.1, cfg.learning_rate);
    }
    return m;
}

// Probability that the answer is high quality; the label is high only when
// the probability strictly exceeds 0.5.
inline std::pair<double, int> predict_quality(const LogRegModel& m, const std::vector<double>& x) {
    const double p = 1.0 / (1.0 + std::exp(-m.raw_score(x)));
    return {p, p > 0.5 ? 1 : 0};
}

inline json logreg_to_json(const LogRegModel& m) {
    json j;
    j["weights"] = m.weights;
    j["bias"] = m.bias;
    j["l2"] = m.l2;
    return j;
}

inline LogRegModel logreg_from_json(const json& j) {
    LogRegModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.l2 = j.at("l2").get<double>();
    return m;
}

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

struct NbModel {
    // Index 0 = negative class, 1 = positive class.
    std::array<double, 2> log_prior{};
    std::array<std::vector<double>, 2> mean;
    std::array<std::vector<double>, 2> variance;  // floored at 1e-9
};

inline NbModel train_nb(const Rows& x, const std::vector<int>& y) {
    detail::check_xy(x, y);
    const std::size_t dim = x[0].size();
    NbModel m;
    std::array<std::size_t, 2> counts{};
    for (int c = 0; c < 2; ++c) {
        m.mean[c].assign(dim, 0.0);
        m.variance[c].assign(dim, 0.0);
    }
    for (std::size_t r = 0; r < x.size(); ++r) {
        const int c = y[r] == 1 ? 1 : 0;
        counts[c]++;
        for (std::size_t j = 0; j < dim; ++j) m.mean[c][j] += x[r][j];
    }
    for (int c = 0; c < 2; ++c)
        for (double& v : m.mean[c]) v /= static_cast<double>(counts[c]);
    for (std::size_t r = 0; r < x.size(); ++r) {
        const int c = y[r] == 1 ? 1 : 0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = x[r][j] - m.mean[c][j];
            m.variance[c][j] += d * d;
        }
    }
    for (int c = 0; c < 2; ++c)
        for (double& v : m.variance[c])
            v = std::max(v / static_cast<double>(counts[c]), 1e-9);
    // Laplace-smoothed priors keep both log terms finite.
    const double n = static_cast<double>(x.size());
    m.log_prior[0] = std::log((static_cast<double>(counts[0]) + 1.0) / (n + 2.0));
    m.log_prior[1] = std::log((static_cast<double>(counts[1]) + 1.0) / (n + 2.0));
    return m;
}

inline std::pair<double, int> predict_nb(const NbModel& m, const std::vector<double>& x) {
    if (x.size() != m.mean[0].size()) throw ValidationError("predict_nb: dim mismatch");
    std::array<double, 2> log_post = m.log_prior;
    for (int c = 0; c < 2; ++c) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double v = m.variance[c][j];
            const double d = x[j] - m.mean[c][j];
            log_post[c] += -0.5 * std::log(2.0 * 3.14159265358979323846 * v) - d * d / (2.0 * v);
        }
    }
    const double mx = std::max(log_post[0], log_post[1]);
    const double e0 = std::exp(log_post[0] - mx);
    const double e1 = std::exp(log_post[1] - mx);
    const double p = e1 / (e0 + e1);
    return {p, p > 0.5 ? 1 : 0};
}

inline json nb_to_json(const NbModel& m) {
    json j;
    j["log_prior"] = m.log_prior;
    j["mean"] = m.mean;
    j["variance"] = m.variance;
    return j;
}

inline NbModel nb_from_json(const json& j) {
    NbModel m;
    const auto lp = j.at("log_prior").get<std::vector<double>>();
    if (lp.size() != 2) throw ValidationError("nb model: malformed log_prior");
    m.log_prior = {lp[0], lp[1]};
    const auto mean = j.at("mean").get<std::vector<std::vector<double>>>();
    const auto var = j.at("variance").get<std::vector<std::vector<double>>>();
    if (mean.size() != 2 || var.size() != 2) throw ValidationError("nb model: malformed arrays");
    m.mean = {mean[0], mean[1]};
    m.variance = {var[0], var[1]};
    return m;
}

// ---------------------------------------------------------------------------
// Metrics

struct Prf1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Positive class is 1; any zero denominator yields 0 for that metric.
inline Prf1 prf1(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size()) throw ValidationError("prf1: length mismatch");
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == 1 && truth[i] == 1) ++tp;
        if (predicted[i] == 1 && truth[i] != 1) ++fp;
        if (predicted[i] != 1 && truth[i] == 1) ++fn;
    }
    Prf1 out;
    out.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    out.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    out.f1 = out.precision + out.recall > 0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

// Mann-Whitney statistic: the fraction of (positive, negative) pairs the
// positive outscores, ties counting one half. Computed from integer pair
// counts so it agrees exactly with brute-force enumeration.
inline double auc(const std::vector<double>& scores, const std::vector<int>& truth) {
    if (scores.size() != truth.size()) throw ValidationError("auc: length mismatch");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::uint64_t n_pos = 0, n_neg = 0;
    for (int t : truth) (t == 1 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0) throw ValidationError("auc: single-class input");
    std::uint64_t twice_wins_plus_ties = 0;
    std::uint64_t neg_below = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::uint64_t pos_here = 0, neg_here = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (truth[order[j]] == 1 ? pos_here : neg_here)++;
            ++j;
        }
        twice_wins_plus_ties += pos_here * (2 * neg_below + neg_here);
        neg_below += neg_here;
        i = j;
    }
    return static_cast<double>(twice_wins_plus_ties) /
           (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// ---------------------------------------------------------------------------
// Chi-squared feature ranking

struct RankedFeature {
    std::string name;
    double statistic = 0.0;
    double rescaled = 0.0;  // min-max mapped to [0, 100] across features
};

struct FeatureRanking {
    std::vector<RankedFeature> entries;  // descending by statistic
    std::string normalization_note;
};

namespace detail {

// Bin ids for one feature column. Features with at most n_bins distinct
// values keep their natural categories; anything else is split into
// equal-frequency bins by sorted position (stable in the original order, so
// the binning is invariant under strictly monotone transforms).
inline std::vector<std::size_t> bin_feature(const std::vector<double>& values,
                                            std::size_t n_bins, std::size_t* n_used) {
    std::vector<double> distinct(values);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<std::size_t> bins(values.size());
    if (distinct.size() <= n_bins) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            const auto it = std::lower_bound(distinct.begin(), distinct.end(), values[i]);
            bins[i] = static_cast<std::size_t>(it - distinct.begin());
        }
        *n_used = distinct.size();
        return bins;
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t n = values.size();
    const std::size_t base = n / n_bins;
    const std::size_t rem = n % n_bins;
    std::size_t pos = 0;
    for (std::size_t g = 0; g < n_bins; ++g) {
        const std::size_t size = base + (g < rem ? 1 : 0);
        for (std::size_t k = 0; k < size; ++k) bins[order[pos++]] = g;
    }
    *n_used = n_bins;
    return bins;
}

inline double chi2_table(const std::vector<std::array<double, 2>>& table) {
    double total = 0.0, col0 = 0.0, col1 = 0.0;
    for (const auto& row : table) {
        col0 += row[0];
        col1 += row[1];
        total += row[0] + row[1];
    }
    if (total == 0.0) return 0.0;
    double chi = 0.0;
    for (const auto& row : table) {
        const double row_total = row[0] + row[1];
        if (row_total == 0.0) continue;
        const double e0 = row_total * col0 / total;
        const double e1 = row_total * col1 / total;
        if (e0 > 0.0) chi += (row[0] - e0) * (row[0] - e0) / e0;
        if (e1 > 0.0) chi += (row[1] - e1) * (row[1] - e1) / e1;
    }
    return chi;
}

}  // namespace detail

// Ranks features by the chi-squared statistic of their binned values against
// the class label. Ties keep the original feature order.
inline FeatureRanking chi_squared_rank(const Rows& rows, const std::vector<std::string>& names,
                                       const std::vector<int>& labels, std::size_t n_bins = 10) {
    if (rows.empty()) throw ValidationError("chi_squared_rank: empty matrix");
    if (rows.size() != labels.size()) throw ValidationError("chi_squared_rank: label mismatch");
    if (n_bins < 2) throw ValidationError("chi_squared_rank: n_bins must be at least 2");
    const std::size_t dim = rows[0].size();
    if (names.size() != dim) throw ValidationError("chi_squared_rank: name count mismatch");
    bool has_pos = false, has_neg = false;
    for (int v : labels) (v == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw ValidationError("chi_squared_rank: single-class labels");

    FeatureRanking ranking;
    ranking.normalization_note =
        "statistics rescaled feature-wise by min-max to [0,100]; raw values retained";
    std::vector<double> column(rows.size());
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t r = 0; r < rows.size(); ++r) column[r] = rows[r][j];
        std::size_t n_used = 0;
        const auto bins = detail::bin_feature(column, n_bins, &n_used);
        std::vector<std::array<double, 2>> table(n_used, {0.0, 0.0});
        for (std::size_t r = 0; r < rows.size(); ++r)
            table[bins[r]][labels[r] == 1 ? 0 : 1] += 1.0;
        ranking.entries.push_back({names[j], detail::chi2_table(table), 0.0});
    }
    double lo = ranking.entries[0].statistic, hi = lo;
    for (const auto& e : ranking.entries) {
        lo = std::min(lo, e.statistic);
        hi = std::max(hi, e.statistic);
    }
    for (auto& e : ranking.entries)
        e.rescaled = hi > lo ? 100.0 * (e.statistic - lo) / (hi - lo) : 0.0;
    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const RankedFeature& a, const RankedFeature& b) {
                         return a.statistic > b.statistic;
                     });
    return ranking;
}

// ---------------------------------------------------------------------------
// Distribution report

struct GroupRatio {
    std::size_t size = 0;
    double high_ratio = 0.0;
    double low_ratio = 0.0;
};

// Sorts by value (stable), splits into n_groups equal-frequency groups with
// any remainder spread over the leading groups, and reports the class mix
// inside each group.
inline std::vector<GroupRatio> distribution_report(const std::vector<double>& values,
                                                   const std::vector<int>& labels,
                                                   std::size_t n_groups) {
    if (values.size() != labels.size()) throw ValidationError("distribution_report: mismatch");
    if (n_groups < 2) throw ValidationError("distribution_report: n_groups must be at least 2");
    if (values.size() < n_groups)
        throw ValidationError("distribution_report: fewer values than groups");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t base = values.size() / n_groups;
    const std::size_t rem = values.size() % n_groups;
    std::vector<GroupRatio> out(n_groups);
    std::size_t pos = 0;
    for (std::size_t g = 0; g < n_groups; ++g) {
        const std::size_t size = base + (g < rem ? 1 : 0);
        std::size_t high = 0;
        for (std::size_t k = 0; k < size; ++k) high += labels[order[pos + k]] == 1;
        out[g].size = size;
        out[g].high_ratio = static_cast<double>(high) / static_cast<double>(size);
        out[g].low_ratio = 1.0 - out[g].high_ratio;
        pos += size;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Paired t-test

namespace detail {

// Continued-fraction evaluation of the regularized incomplete beta function.
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                               a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
};

// Student's paired two-tailed t-test. Identical samples return p = 1 by
// convention; zero variance with a nonzero mean returns the smallest
// positive p representable.
inline TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ValidationError("paired_ttest: length mismatch");
    if (a.size() < 2) throw ValidationError("paired_ttest: need at least two pairs");
    const std::size_t n = a.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n - 1);
    TTestResult out;
    if (var == 0.0) {
        if (mean == 0.0) {
            out.t = 0.0;
            out.p = 1.0;
        } else {
            out.t = mean > 0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
            out.p = std::numeric_limits<double>::min();
        }
        return out;
    }
    out.t = mean / std::sqrt(var / static_cast<double>(n));
    const double nu = static_cast<double>(n - 1);
    out.p = detail::incomplete_beta(nu / 2.0, 0.5, nu / (nu + out.t * out.t));
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation report

struct FoldRow {
    std::size_t trial = 0;
    std::size_t fold = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double auc = 0.0;
};

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0;  // sample convention (n-1)
};

struct EvalReport {
    std::vector<FoldRow> rows;  // fixed (trial, fold) order
    MetricSummary precision, recall, f1, auc;
    std::size_t n_trials = 0;
    std::size_t n_folds = 0;
    std::string config_fingerprint;
};

inline MetricSummary summarize(const std::vector<double>& xs) {
    MetricSummary s;
    if (xs.empty()) return s;
    for (double v : xs) s.mean += v;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double v : xs) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

inline void finalize_report(EvalReport& r) {
    std::vector<double> p, rc, f, a;
    for (const auto& row : r.rows) {
        p.push_back(row.precision);
        rc.push_back(row.recall);
        f.push_back(row.f1);
        a.push_back(row.auc);
    }
    r.precision = summarize(p);
    r.recall = summarize(rc);
    r.f1 = summarize(f);
    r.auc = summarize(a);
}

inline json report_to_json(const EvalReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr;
        jr["trial"] = row.trial;
        jr["fold"] = row.fold;
        jr["precision"] = row.precision;
        jr["recall"] = row.recall;
        jr["f1"] = row.f1;
        jr["auc"] = row.auc;
        rows.push_back(jr);
    }
    json j;
    j["rows"] = rows;
    j["n_trials"] = r.n_trials;
    j["n_folds"] = r.n_folds;
    j["config_fingerprint"] = r.config_fingerprint;
    json agg;
    const auto put = [&](const char* name, const MetricSummary& s) {
        agg[name] = {{"mean", s.mean}, {"stddev", s.stddev}};
    };
    put("precision", r.precision);
    put("recall", r.recall);
    put("f1", r.f1);
    put("auc", r.auc);
    j["aggregate"] = agg;
    return j;
}

}  // namespace hqa::learner
