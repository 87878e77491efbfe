#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "hqa/learner.hpp"
#include "hqa/rng.hpp"
#include "oracles.hpp"

using namespace hqa;
using namespace hqa::learner;
using Catch::Matchers::WithinAbs;

namespace {

// Linearly separable blobs around (-1,-1) and (1,1).
void blob_data(std::size_t n_per_class, std::uint64_t seed, Rows& x, std::vector<int>& y) {
    Rng rng(seed);
    for (std::size_t i = 0; i < 2 * n_per_class; ++i) {
        const int label = i < n_per_class ? 0 : 1;
        const double cx = label == 1 ? 1.0 : -1.0;
        x.push_back({cx + rng.normal(0.0, 0.3), cx + rng.normal(0.0, 0.3)});
        y.push_back(label);
    }
}

}  // namespace

TEST_CASE("logistic regression separates well-separated blobs") {
    Rows x;
    std::vector<int> y;
    blob_data(40, 11, x, y);
    LogRegConfig cfg;
    cfg.n_iterations = 500;
    const auto m = train_logreg(x, y, cfg);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        correct += predict_quality(m, x[i]).second == y[i];
    CHECK(correct == x.size());
    REQUIRE(m.loss_log.size() >= 2);
    for (std::size_t i = 1; i < m.loss_log.size(); ++i)
        CHECK(m.loss_log[i] <= m.loss_log[i - 1]);
}

TEST_CASE("strong l2 shrinks the separating weights") {
    Rows x;
    std::vector<int> y;
    blob_data(30, 21, x, y);
    LogRegConfig weak;
    weak.l2 = 1e-6;
    LogRegConfig strong;
    strong.l2 = 100.0;
    const auto mw = train_logreg(x, y, weak);
    const auto ms = train_logreg(x, y, strong);
    const auto norm = [](const LogRegModel& m) {
        double s = 0.0;
        for (double w : m.weights) s += w * w;
        return std::sqrt(s);
    };
    CHECK(norm(ms) < 0.1 * norm(mw));
    CHECK(norm(ms) < 0.05);
}

TEST_CASE("logistic gradient matches finite differences") {
    Rows x;
    std::vector<int> y;
    blob_data(10, 31, x, y);
    std::vector<double> w = {0.3, -0.7};
    const double b = 0.25;
    const double l2 = 0.01;
    const auto lg = detail::logreg_loss_grad(x, y, w, b, l2);
    const auto fd = oracle::logreg_grad_fd(x, y, w, b, l2);
    REQUIRE(fd.size() == 3);
    CHECK_THAT(lg.grad_w[0], WithinAbs(fd[0], 1e-7));
    CHECK_THAT(lg.grad_w[1], WithinAbs(fd[1], 1e-7));
    CHECK_THAT(lg.grad_b, WithinAbs(fd[2], 1e-7));
    CHECK_THAT(lg.loss, WithinAbs(oracle::logreg_loss(x, y, w, b, l2), 1e-12));
}

TEST_CASE("predict_quality thresholds strictly above one half") {
    LogRegModel m;
    m.weights = {1.0};
    m.bias = 0.0;
    const auto [p_mid, label_mid] = predict_quality(m, {0.0});
    CHECK(p_mid == 0.5);
    CHECK(label_mid == 0);  // exactly one half is not high
    const auto [p_hi, label_hi] = predict_quality(m, {2.0});
    CHECK_THAT(p_hi, WithinAbs(0.8807970779778823, 1e-15));  // sigma(2)
    CHECK(label_hi == 1);
    const auto [p_lo, label_lo] = predict_quality(m, {-2.0});
    CHECK_THAT(p_lo + p_hi, WithinAbs(1.0, 1e-15));
    CHECK(label_lo == 0);
}

TEST_CASE("logreg training rejects degenerate input") {
    CHECK_THROWS_AS(train_logreg({}, {}), ValidationError);
    CHECK_THROWS_AS(train_logreg({{1.0}, {2.0}}, {1, 1}), ValidationError);
    CHECK_THROWS_AS(train_logreg({{1.0}, {2.0, 3.0}}, {1, 0}), ValidationError);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(train_logreg({{1.0}, {inf}}, {1, 0}), ValidationError);
}

TEST_CASE("logreg json round-trips") {
    Rows x;
    std::vector<int> y;
    blob_data(15, 41, x, y);
    const auto m = train_logreg(x, y);
    const auto back = logreg_from_json(logreg_to_json(m));
    CHECK(back.weights == m.weights);
    CHECK(back.bias == m.bias);
    CHECK(predict_quality(back, x[0]) == predict_quality(m, x[0]));
}

TEST_CASE("gaussian naive bayes separates and respects priors") {
    Rows x;
    std::vector<int> y;
    blob_data(25, 51, x, y);
    const auto m = train_nb(x, y);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.size(); ++i) correct += predict_nb(m, x[i]).second == y[i];
    CHECK(correct >= 48);  // blobs overlap only in the extreme tails

    // Identical likelihoods leave the prior in charge: 3 positive, 1 negative.
    Rows xp = {{0.0}, {0.0}, {0.0}, {0.0}};
    std::vector<int> yp = {1, 1, 1, 0};
    const auto mp = train_nb(xp, yp);
    CHECK_THAT(mp.log_prior[1], WithinAbs(std::log(4.0 / 6.0), 1e-15));
    CHECK_THAT(mp.log_prior[0], WithinAbs(std::log(2.0 / 6.0), 1e-15));
    const auto [p, label] = predict_nb(mp, {0.0});
    CHECK_THAT(p, WithinAbs(2.0 / 3.0, 1e-9));
    CHECK(label == 1);

    // Constant features hit the variance floor instead of dividing by zero.
    CHECK(mp.variance[0][0] == 1e-9);
    CHECK(mp.variance[1][0] == 1e-9);
}

TEST_CASE("nb json round-trips") {
    Rows x;
    std::vector<int> y;
    blob_data(12, 61, x, y);
    const auto m = train_nb(x, y);
    const auto back = nb_from_json(nb_to_json(m));
    CHECK(back.log_prior == m.log_prior);
    CHECK(back.mean == m.mean);
    CHECK(back.variance == m.variance);
}

TEST_CASE("precision recall f1 follow the confusion counts") {
    // tp=8 fp=2 fn=2 tn=3.
    std::vector<int> pred, truth;
    for (int i = 0; i < 8; ++i) {
        pred.push_back(1);
        truth.push_back(1);
    }
    for (int i = 0; i < 2; ++i) {
        pred.push_back(1);
        truth.push_back(0);
    }
    for (int i = 0; i < 2; ++i) {
        pred.push_back(0);
        truth.push_back(1);
    }
    for (int i = 0; i < 3; ++i) {
        pred.push_back(0);
        truth.push_back(0);
    }
    const auto r = prf1(pred, truth);
    CHECK_THAT(r.precision, WithinAbs(0.8, 1e-15));
    CHECK_THAT(r.recall, WithinAbs(0.8, 1e-15));
    CHECK_THAT(r.f1, WithinAbs(0.8, 1e-15));

    const auto perfect = prf1({1, 0, 1}, {1, 0, 1});
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.f1 == 1.0);

    // No positive predictions and no positive truth: all metrics 0, no NaN.
    const auto zero = prf1({0, 0}, {0, 0});
    CHECK(zero.precision == 0.0);
    CHECK(zero.recall == 0.0);
    CHECK(zero.f1 == 0.0);

    CHECK_THROWS_AS(prf1({1}, {1, 0}), ValidationError);
}

TEST_CASE("auc matches exhaustive pair counting") {
    CHECK(auc({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}) == 0.75);
    CHECK(auc({0.2, 0.9}, {0, 1}) == 1.0);
    CHECK(auc({0.9, 0.2}, {0, 1}) == 0.0);
    CHECK(auc({0.5, 0.5, 0.5, 0.5}, {0, 1, 0, 1}) == 0.5);

    Rng rng(71);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> scores;
        std::vector<int> truth;
        for (int i = 0; i < 100; ++i) {
            // Coarse grid forces plenty of exact ties.
            scores.push_back(static_cast<double>(rng.below(8)) / 8.0);
            truth.push_back(rng.bernoulli(0.4) ? 1 : 0);
        }
        bool both = false;
        if (std::count(truth.begin(), truth.end(), 1) > 0 &&
            std::count(truth.begin(), truth.end(), 0) > 0)
            both = true;
        if (!both) continue;
        const double got = auc(scores, truth);
        const double want = oracle::auc_pairs(scores, truth);
        CHECK(got == want);  // both are exact rational arithmetic

        std::vector<double> negated(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) negated[i] = -scores[i];
        CHECK_THAT(auc(negated, truth) + got, WithinAbs(1.0, 1e-15));
    }
    CHECK_THROWS_AS(auc({0.1, 0.2}, {1, 1}), ValidationError);
}

TEST_CASE("chi squared ranking reproduces the two-bin contingency value") {
    Rows rows;
    std::vector<int> labels;
    for (int i = 0; i < 10; ++i) {
        rows.push_back({0.0});
        labels.push_back(1);
    }
    for (int i = 0; i < 20; ++i) {
        rows.push_back({0.0});
        labels.push_back(0);
    }
    for (int i = 0; i < 30; ++i) {
        rows.push_back({1.0});
        labels.push_back(1);
    }
    for (int i = 0; i < 40; ++i) {
        rows.push_back({1.0});
        labels.push_back(0);
    }
    const auto ranking = chi_squared_rank(rows, {"f"}, labels, 10);
    REQUIRE(ranking.entries.size() == 1);
    CHECK_THAT(ranking.entries[0].statistic, WithinAbs(50.0 / 63.0, 1e-9));
    CHECK_THAT(ranking.entries[0].statistic,
               WithinAbs(oracle::chi2_table({{10, 20}, {30, 40}}), 1e-12));
}

TEST_CASE("chi squared ranking orders informative above independent features") {
    Rng rng(81);
    Rows rows;
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        const int label = i % 2;
        const double informative = label == 1 ? rng.normal(3.0, 0.5) : rng.normal(-3.0, 0.5);
        const double noise = rng.normal(0.0, 1.0);
        rows.push_back({informative, noise});
        labels.push_back(label);
    }
    const auto ranking = chi_squared_rank(rows, {"signal", "noise"}, labels, 10);
    CHECK(ranking.entries[0].name == "signal");
    CHECK(ranking.entries[1].name == "noise");
    CHECK(ranking.entries[0].statistic > ranking.entries[1].statistic);
    CHECK(ranking.entries[0].rescaled == 100.0);
    CHECK(ranking.entries[1].rescaled == 0.0);

    // Equal-frequency binning by rank is invariant under monotone transforms.
    Rows warped = rows;
    for (auto& r : warped) {
        r[0] = std::exp(r[0]);
        r[1] = r[1] * r[1] * r[1];
    }
    const auto warped_ranking = chi_squared_rank(warped, {"signal", "noise"}, labels, 10);
    CHECK(warped_ranking.entries[0].statistic == ranking.entries[0].statistic);
    CHECK(warped_ranking.entries[1].statistic == ranking.entries[1].statistic);

    // Column order does not change per-feature statistics.
    Rows swapped;
    for (const auto& r : rows) swapped.push_back({r[1], r[0]});
    const auto swapped_ranking = chi_squared_rank(swapped, {"noise", "signal"}, labels, 10);
    std::map<std::string, double> by_name;
    for (const auto& e : swapped_ranking.entries) by_name[e.name] = e.statistic;
    CHECK(by_name.at("signal") == ranking.entries[0].statistic);
    CHECK(by_name.at("noise") == ranking.entries[1].statistic);
}

TEST_CASE("distribution report spreads the remainder over leading groups") {
    std::vector<double> values;
    std::vector<int> labels;
    for (int i = 0; i < 12; ++i) {
        values.push_back(static_cast<double>(i));
        labels.push_back(i < 6 ? 0 : 1);  // top half of the ordering is high
    }
    const auto groups = distribution_report(values, labels, 10);
    REQUIRE(groups.size() == 10);
    CHECK(groups[0].size == 2);
    CHECK(groups[1].size == 2);
    for (std::size_t g = 2; g < 10; ++g) CHECK(groups[g].size == 1);
    CHECK(groups[0].high_ratio == 0.0);
    CHECK(groups[9].high_ratio == 1.0);
    CHECK_THAT(groups[9].low_ratio, WithinAbs(0.0, 1e-15));

    CHECK_THROWS_AS(distribution_report({1.0, 2.0}, {0, 1}, 10), ValidationError);
    CHECK_THROWS_AS(distribution_report(values, labels, 1), ValidationError);
}

TEST_CASE("paired t-test conventions and worked value") {
    const std::vector<double> same = {0.6, 0.7, 0.8};
    const auto eq = paired_ttest(same, same);
    CHECK(eq.t == 0.0);
    CHECK(eq.p == 1.0);

    const auto shifted = paired_ttest({2.0, 3.0, 4.0}, {1.0, 2.0, 3.0});
    CHECK(std::isinf(shifted.t));
    CHECK(shifted.t > 0);
    CHECK(shifted.p == DBL_MIN);

    // d = a - b = [2,-1,3,0,1]: mean 1, sample var 2.5, t = sqrt(2).
    const std::vector<double> a = {3.0, 1.0, 5.0, 2.0, 4.0};
    const std::vector<double> b = {1.0, 2.0, 2.0, 2.0, 3.0};
    const auto r = paired_ttest(a, b);
    CHECK_THAT(r.t, WithinAbs(std::sqrt(2.0), 1e-12));
    CHECK_THAT(r.p, WithinAbs(0.23019964108049873, 1e-9));
    CHECK_THAT(r.p, WithinAbs(oracle::t_pvalue_simpson(r.t, 4), 1e-6));

    const auto swapped = paired_ttest(b, a);
    CHECK_THAT(swapped.t, WithinAbs(-r.t, 1e-12));
    CHECK_THAT(swapped.p, WithinAbs(r.p, 1e-12));

    CHECK_THROWS_AS(paired_ttest({1.0}, {2.0}), ValidationError);
    CHECK_THROWS_AS(paired_ttest({1.0, 2.0}, {1.0}), ValidationError);
}

TEST_CASE("metric summaries use the sample standard deviation") {
    const auto s = summarize({0.7, 0.8, 0.9});
    CHECK_THAT(s.mean, WithinAbs(0.8, 1e-15));
    CHECK_THAT(s.stddev, WithinAbs(0.1, 1e-12));
    const auto single = summarize({0.5});
    CHECK(single.mean == 0.5);
    CHECK(single.stddev == 0.0);

    EvalReport rep;
    rep.rows.push_back({0, 0, 1.0, 0.5, 0.6, 0.7});
    rep.rows.push_back({0, 1, 0.5, 0.7, 0.8, 0.9});
    rep.n_trials = 1;
    rep.n_folds = 2;
    finalize_report(rep);
    CHECK_THAT(rep.precision.mean, WithinAbs(0.75, 1e-15));
    CHECK_THAT(rep.auc.mean, WithinAbs(0.8, 1e-15));
    const auto j = report_to_json(rep);
    CHECK(j.at("rows").size() == 2);
    CHECK(j.at("aggregate").at("f1").at("mean").get<double>() == rep.f1.mean);
}
