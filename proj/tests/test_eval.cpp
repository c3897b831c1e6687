#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "frozen.hpp"
#include "oracles.hpp"
#include "poqg/errors.hpp"
#include "poqg/eval.hpp"

using namespace poqg;

TEST_CASE("confusion matrix counts each quadrant") {
    const std::vector<int> predicted{1, 1, 0, 0, 1, 0};
    const std::vector<int> actual{1, 0, 1, 0, 1, 0};
    const ConfusionMatrix m = confusion(predicted, actual);
    CHECK(m.tp == 2);
    CHECK(m.fp == 1);
    CHECK(m.fn == 1);
    CHECK(m.tn == 2);
}

TEST_CASE("metrics match hand-computed values") {
    // tp=8, fn=2 (tpr=0.8); tn=15, fp=5 (tnr=0.75, fpr=0.25).
    ConfusionMatrix m;
    m.tp = 8;
    m.fn = 2;
    m.tn = 15;
    m.fp = 5;
    const std::vector<double> scores{0.9, 0.1};
    const std::vector<int> actual{1, 0};
    const MetricsReport r = metrics(m, scores, actual);
    CHECK(r.tpr.value() == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(r.tnr.value() == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(r.fpr.value() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(r.g_mean.value() == doctest::Approx(std::sqrt(0.8 * 0.75)).epsilon(1e-15));
    CHECK(r.balanced_accuracy.value() == doctest::Approx(0.775).epsilon(1e-15));
    CHECK(r.roc_auc.value() == 1.0);
    // Variant definitions some comparisons report: sqrt(tpr*fpr), (tpr+fpr)/2.
    CHECK(r.gmean_tprfpr.value() == doctest::Approx(std::sqrt(0.8 * 0.25)).epsilon(1e-15));
    CHECK(r.auc_midpoint.value() == doctest::Approx((0.8 + 0.25) / 2.0).epsilon(1e-15));
}

TEST_CASE("metrics stay unset without a denominator") {
    ConfusionMatrix no_positives;
    no_positives.tn = 5;
    no_positives.fp = 1;
    const std::vector<double> scores{0.2, 0.3};
    const std::vector<int> actual{0, 0};
    const MetricsReport r = metrics(no_positives, scores, actual);
    CHECK(!r.tpr.has_value());
    CHECK(!r.g_mean.has_value());
    CHECK(!r.roc_auc.has_value());
    CHECK(r.tnr.has_value());

    ConfusionMatrix no_negatives;
    no_negatives.tp = 4;
    no_negatives.fn = 2;
    const std::vector<int> all_pos{1, 1};
    const MetricsReport r2 = metrics(no_negatives, scores, all_pos);
    CHECK(!r2.tnr.has_value());
    CHECK(!r2.fpr.has_value());
    CHECK(!r2.g_mean.has_value());
    CHECK(r2.tpr.has_value());
}

TEST_CASE("roc_auc reproduces the frozen reference values") {
    for (const frozen::AucCase& ac : frozen::auc_cases()) {
        CAPTURE(ac.name);
        const auto got = roc_auc(ac.scores, ac.labels);
        REQUIRE(got.has_value());
        CHECK(*got == doctest::Approx(ac.auc).epsilon(1e-12));
    }
}

TEST_CASE("roc_auc equals trapezoidal integration on random score sets") {
    RngStream rng(2001);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 5 + rng.uniform_index(60);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has_pos = false;
        bool has_neg = false;
        for (std::size_t i = 0; i < n; ++i) {
            // Quantize half the time so ties occur.
            const double s = rng.uniform();
            scores[i] = trial % 2 == 0 ? std::round(s * 8.0) / 8.0 : s;
            labels[i] = rng.uniform() < 0.3 ? 1 : 0;
            (labels[i] == 1 ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) {
            continue;
        }
        const auto got = roc_auc(scores, labels);
        REQUIRE(got.has_value());
        CHECK(*got == doctest::Approx(oracles::trapezoid_auc(scores, labels)).epsilon(1e-12));
    }
}

TEST_CASE("roc_auc edge cases") {
    const std::vector<double> scores{0.1, 0.9};
    const std::vector<int> one_class{1, 1};
    CHECK(!roc_auc(scores, one_class).has_value());

    const std::vector<double> bad{0.1, std::nan("")};
    const std::vector<int> labels{1, 0};
    CHECK_THROWS_AS(roc_auc(bad, labels), DataError);
}

TEST_CASE("knn scorer votes by minority fraction") {
    Dataset train;
    train.features = Matrix(0, 1);
    for (double x : {0.0, 0.1, 0.2, 1.0, 1.1, 1.2}) {
        train.features.append_row(std::vector<double>{x});
    }
    train.labels = {0, 0, 0, 1, 1, 1};
    train.feature_names = {"x"};

    const Scorer s = train_knn(train, 3);
    const std::vector<double> near_majority{0.05};
    const std::vector<double> near_minority{1.05};
    CHECK(s(near_majority) == 0.0);
    CHECK(s(near_minority) == 1.0);
    const std::vector<double> between{0.6};
    const double mid = s(between);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
}

TEST_CASE("logistic gradient agrees with finite differences") {
    RngStream rng(303);
    Matrix x(0, 3);
    std::vector<int> y;
    for (int i = 0; i < 24; ++i) {
        x.append_row(std::vector<double>{rng.normal(), rng.normal(), rng.normal()});
        y.push_back(rng.uniform() < 0.4 ? 1 : 0);
    }
    std::vector<double> w{0.3, -0.2, 0.5, 0.1}; // three weights and a bias

    const std::vector<double> grad = logistic_gradient(x, y, w);
    REQUIRE(grad.size() == w.size());
    const double h = 1e-6;
    for (std::size_t j = 0; j < w.size(); ++j) {
        std::vector<double> wp = w;
        std::vector<double> wm = w;
        wp[j] += h;
        wm[j] -= h;
        const double numeric = (logistic_loss(x, y, wp) - logistic_loss(x, y, wm)) / (2.0 * h);
        CHECK(grad[j] == doctest::Approx(numeric).epsilon(1e-5));
    }
}

TEST_CASE("logistic training lowers the loss and separates separable data") {
    RngStream rng(304);
    const Dataset d = oracles::random_dataset(rng, 40, 30, 2, 4.0, 0.5);
    const Scorer s = train_logistic(d, 300, 0.1);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < d.size(); ++r) {
        const auto row = d.features.row(r);
        const int pred = s(std::span<const double>(row.data(), row.size())) > 0.5 ? 1 : 0;
        correct += pred == d.labels[r];
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(d.size()) > 0.95);
}

TEST_CASE("logistic training rejects a diverging learning rate") {
    RngStream rng(305);
    const Dataset d = oracles::random_dataset(rng, 30, 20, 2);
    using doctest::Contains;
    // The stable loss form keeps ordinary overshoot finite; the guard is an
    // overflow trap, tripped once the weights themselves leave double range.
    CHECK_THROWS_WITH_AS(train_logistic(d, 50, 1e308), Contains("learning_rate"), DataError);
    CHECK_NOTHROW(train_logistic(d, 50, 1e300));
    CHECK_NOTHROW(train_logistic(d, 50, 10.0));
}

TEST_CASE("classifier config validation") {
    ClassifierConfig ok;
    CHECK_NOTHROW(validate(ok));
    ClassifierConfig c = ok;
    c.id = "svm";
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = ok;
    c.knn_k = 0;
    CHECK_THROWS_AS(validate(c), ConfigError);
    // Gradient-descent parameters only matter for the logistic classifier.
    c = ok;
    c.learning_rate = 0.0;
    CHECK_NOTHROW(validate(c));
    c.id = "logistic";
    CHECK_THROWS_AS(validate(c), ConfigError);
    c = ok;
    c.id = "logistic";
    c.epochs = 0;
    CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("cross_validate keeps the fold plan method-independent") {
    RngStream rng(401);
    const Dataset d = oracles::random_dataset(rng, 80, 25, 3);
    ClassifierConfig clf;

    std::vector<std::vector<std::size_t>> smote_folds;
    std::vector<std::vector<std::size_t>> poqg_folds;
    const auto capture = [](std::vector<std::vector<std::size_t>>& into) {
        return [&into](std::size_t, const std::vector<std::size_t>&,
                       const std::vector<std::size_t>& test_rows, const ResampleResult&) {
            into.push_back(test_rows);
        };
    };

    MethodConfig smote_cfg;
    smote_cfg.method = Method::smote;
    cross_validate(d, "ds", smote_cfg, clf, 5, 99, capture(smote_folds));

    MethodConfig poqg_cfg;
    poqg_cfg.method = Method::poqg;
    cross_validate(d, "ds", poqg_cfg, clf, 5, 99, capture(poqg_folds));

    // Same dataset id and seed give identical splits across methods, the
    // basis for the paired comparisons.
    CHECK(smote_folds == poqg_folds);

    // Different dataset id changes the plan.
    std::vector<std::vector<std::size_t>> other_folds;
    cross_validate(d, "other", smote_cfg, clf, 5, 99, capture(other_folds));
    CHECK(other_folds != smote_folds);
}

TEST_CASE("cross_validate resamples train rows only and tests on untouched rows") {
    RngStream rng(402);
    const Dataset d = oracles::random_dataset(rng, 60, 20, 2);
    MethodConfig cfg;
    cfg.method = Method::poqg;
    cfg.poqg.k = 4;
    ClassifierConfig clf;

    std::size_t folds_seen = 0;
    const FoldAudit audit = [&](std::size_t, const std::vector<std::size_t>& train_rows,
                                const std::vector<std::size_t>& test_rows,
                                const ResampleResult& resampled) {
        ++folds_seen;
        // Train and test partition the dataset.
        std::set<std::size_t> train_set(train_rows.begin(), train_rows.end());
        CHECK(train_set.size() == train_rows.size());
        for (std::size_t row : test_rows) {
            CHECK(train_set.count(row) == 0);
        }
        CHECK(train_rows.size() + test_rows.size() == d.size());
        // The resampler saw exactly the train subset.
        CHECK(resampled.n_original == train_rows.size());
        // Every synthetic parent is a train row (provenance indices are
        // positions within train_rows): no test row leaks into generation.
        for (const SyntheticRecord& rec : resampled.synthetics) {
            CHECK(rec.anchor < train_rows.size());
            CHECK(rec.parent_a < train_rows.size());
            CHECK(rec.parent_b < train_rows.size());
        }
    };

    const EvalReport r = cross_validate(d, "leak-check", cfg, clf, 5, 7, audit);
    CHECK(folds_seen == 5);
    CHECK(r.n_folds == 5);
    CHECK(r.folds.size() == 5);
    CHECK(r.dataset_id == "leak-check");
    CHECK(r.method == "poqg");
    CHECK(r.classifier == "knn");
}

TEST_CASE("cross_validate aggregates fold metrics") {
    RngStream rng(403);
    const Dataset d = oracles::random_dataset(rng, 70, 20, 2);
    MethodConfig cfg;
    cfg.method = Method::smote;
    ClassifierConfig clf;
    const EvalReport r = cross_validate(d, "agg", cfg, clf, 5, 11);

    std::vector<double> gs;
    std::vector<double> aucs;
    for (const FoldOutcome& f : r.folds) {
        if (f.metrics.g_mean && f.metrics.roc_auc) {
            gs.push_back(*f.metrics.g_mean);
            aucs.push_back(*f.metrics.roc_auc);
        }
    }
    REQUIRE(gs.size() == 5);
    CHECK(r.undefined_folds == 0);

    const auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) {
            s += x;
        }
        return s / static_cast<double>(v.size());
    };
    const auto stddev = [&](const std::vector<double>& v) {
        const double m = mean(v);
        double s = 0.0;
        for (double x : v) {
            s += (x - m) * (x - m);
        }
        return std::sqrt(s / static_cast<double>(v.size() - 1)); // sample form
    };
    CHECK(r.mean_g_mean.value() == doctest::Approx(mean(gs)).epsilon(1e-12));
    CHECK(r.std_g_mean.value() == doctest::Approx(stddev(gs)).epsilon(1e-12));
    CHECK(r.mean_roc_auc.value() == doctest::Approx(mean(aucs)).epsilon(1e-12));
    CHECK(r.std_roc_auc.value() == doctest::Approx(stddev(aucs)).epsilon(1e-12));

    // Determinism.
    const EvalReport r2 = cross_validate(d, "agg", cfg, clf, 5, 11);
    REQUIRE(r2.folds.size() == r.folds.size());
    for (std::size_t i = 0; i < r.folds.size(); ++i) {
        CHECK(r2.folds[i].metrics.g_mean == r.folds[i].metrics.g_mean);
        CHECK(r2.folds[i].metrics.roc_auc == r.folds[i].metrics.roc_auc);
    }
}

TEST_CASE("method none evaluates the imbalanced data untouched") {
    RngStream rng(404);
    const Dataset d = oracles::random_dataset(rng, 60, 15, 2);
    MethodConfig cfg;
    cfg.method = Method::none;
    ClassifierConfig clf;

    const FoldAudit audit = [&](std::size_t, const std::vector<std::size_t>& train_rows,
                                const std::vector<std::size_t>&, const ResampleResult& resampled) {
        CHECK(resampled.synthetics.empty());
        CHECK(resampled.data.size() == train_rows.size());
    };
    const EvalReport r = cross_validate(d, "plain", cfg, clf, 5, 13, audit);
    CHECK(r.method == "none");
}
