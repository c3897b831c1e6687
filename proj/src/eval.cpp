#include "poqg/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "poqg/errors.hpp"

namespace poqg {

ConfusionMatrix confusion(std::span<const int> predicted, std::span<const int> actual) {
    if (predicted.size() != actual.size()) {
        throw InternalError("confusion: prediction and label counts differ");
    }
    if (predicted.empty()) {
        throw DataError("confusion: no observations");
    }
    ConfusionMatrix m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if ((predicted[i] != 0 && predicted[i] != 1) || (actual[i] != 0 && actual[i] != 1)) {
            throw InternalError("confusion: labels must be 0 or 1");
        }
        if (actual[i] == 1) {
            predicted[i] == 1 ? ++m.tp : ++m.fn;
        } else {
            predicted[i] == 1 ? ++m.fp : ++m.tn;
        }
    }
    return m;
}

std::optional<double> roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw InternalError("roc_auc: score and label counts differ");
    }
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) {
            throw DataError("roc_auc: non-finite score at index " + std::to_string(i));
        }
        n_pos += labels[i] == 1;
    }
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        return std::nullopt;
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Average ranks within tie groups, then the Mann-Whitney identity.
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * static_cast<double>(i + 1 + j); // mean of ranks i+1 .. j
        for (std::size_t t = i; t < j; ++t) {
            if (labels[order[t]] == 1) {
                positive_rank_sum += rank;
            }
        }
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

MetricsReport metrics(const ConfusionMatrix& m, std::span<const double> scores,
                      std::span<const int> actual) {
    MetricsReport r;
    if (m.tp + m.fn > 0) {
        r.tpr = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    }
    if (m.fp + m.tn > 0) {
        r.fpr = static_cast<double>(m.fp) / static_cast<double>(m.fp + m.tn);
        r.tnr = static_cast<double>(m.tn) / static_cast<double>(m.fp + m.tn);
    }
    if (r.tpr && r.tnr) {
        r.g_mean = std::sqrt(*r.tpr * *r.tnr);
        r.balanced_accuracy = 0.5 * (*r.tpr + *r.tnr);
    }
    if (r.tpr && r.fpr) {
        r.gmean_tprfpr = std::sqrt(*r.tpr * *r.fpr);
        r.auc_midpoint = 0.5 * (*r.tpr + *r.fpr);
    }
    if (!scores.empty()) {
        r.roc_auc = roc_auc(scores, actual);
    }
    return r;
}

void validate(const ClassifierConfig& cfg) {
    if (cfg.id != "knn" && cfg.id != "logistic") {
        throw ConfigError("unknown classifier '" + cfg.id + "'; valid classifiers: knn, logistic");
    }
    if (cfg.id == "knn" && cfg.knn_k < 1) {
        throw ConfigError("knn_k must be positive");
    }
    if (cfg.id == "logistic") {
        if (cfg.epochs < 1) {
            throw ConfigError("epochs must be positive");
        }
        if (!(cfg.learning_rate > 0.0)) {
            throw ConfigError("learning_rate must be positive");
        }
    }
}

Scorer train_knn(const Dataset& train, std::size_t k) {
    validate(train);
    if (k < 1) {
        throw ConfigError("knn_k must be positive");
    }
    if (train.size() < k) {
        throw DataError("training set has " + std::to_string(train.size()) +
                        " rows, fewer than knn_k=" + std::to_string(k));
    }
    // The scorer owns a copy of the training data.
    const Matrix features = train.features;
    const std::vector<int> labels = train.labels;
    return [features, labels, k](std::span<const double> x) {
        if (x.size() != features.cols()) {
            throw DataError("knn scorer: query has " + std::to_string(x.size()) +
                            " features, expected " + std::to_string(features.cols()));
        }
        std::vector<std::pair<double, std::size_t>> order;
        order.reserve(features.rows());
        for (std::size_t i = 0; i < features.rows(); ++i) {
            order.emplace_back(squared_distance(x, features.row(i)), i);
        }
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                          order.end());
        std::size_t minority = 0;
        for (std::size_t i = 0; i < k; ++i) {
            minority += labels[order[i].second] == 1;
        }
        return static_cast<double>(minority) / static_cast<double>(k);
    };
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double raw_score(const Matrix& x, std::size_t row, const std::vector<double>& w) {
    const std::size_t d = x.cols();
    double z = w[d]; // bias
    for (std::size_t c = 0; c < d; ++c) {
        z += w[c] * x(row, c);
    }
    return z;
}

} // namespace

double logistic_loss(const Matrix& x, const std::vector<int>& y, const std::vector<double>& w) {
    if (w.size() != x.cols() + 1 || y.size() != x.rows() || x.rows() == 0) {
        throw InternalError("logistic_loss: shape mismatch");
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double z = raw_score(x, i, w);
        // log(1 + e^-|z|) + max(0, -yz) form keeps the loss finite.
        const double margin = y[i] == 1 ? z : -z;
        loss += margin >= 0.0 ? std::log1p(std::exp(-margin)) : std::log1p(std::exp(margin)) - margin;
    }
    return loss / static_cast<double>(x.rows());
}

std::vector<double> logistic_gradient(const Matrix& x, const std::vector<int>& y,
                                      const std::vector<double>& w) {
    if (w.size() != x.cols() + 1 || y.size() != x.rows() || x.rows() == 0) {
        throw InternalError("logistic_gradient: shape mismatch");
    }
    std::vector<double> g(w.size(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double err = sigmoid(raw_score(x, i, w)) - static_cast<double>(y[i]);
        for (std::size_t c = 0; c < x.cols(); ++c) {
            g[c] += err * x(i, c);
        }
        g[x.cols()] += err;
    }
    for (double& v : g) {
        v /= static_cast<double>(x.rows());
    }
    return g;
}

Scorer train_logistic(const Dataset& train, std::size_t epochs, double learning_rate) {
    validate(train);
    if (train.count_of(0) == 0 || train.count_of(1) == 0) {
        throw DataError("logistic training needs both classes present");
    }

    // Standardize with training statistics; constant features are zeroed.
    const std::size_t d = train.dim();
    std::vector<double> mean(d, 0.0);
    std::vector<double> inv_std(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < train.size(); ++r) {
            s += train.features(r, c);
        }
        mean[c] = s / static_cast<double>(train.size());
        double var = 0.0;
        for (std::size_t r = 0; r < train.size(); ++r) {
            const double dv = train.features(r, c) - mean[c];
            var += dv * dv;
        }
        var /= static_cast<double>(train.size());
        inv_std[c] = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
    }
    Matrix x(train.size(), d);
    for (std::size_t r = 0; r < train.size(); ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            x(r, c) = (train.features(r, c) - mean[c]) * inv_std[c];
        }
    }

    std::vector<double> w(d + 1, 0.0);
    for (std::size_t e = 0; e < epochs; ++e) {
        const std::vector<double> g = logistic_gradient(x, train.labels, w);
        for (std::size_t c = 0; c < w.size(); ++c) {
            w[c] -= learning_rate * g[c];
        }
        const double loss = logistic_loss(x, train.labels, w);
        if (!std::isfinite(loss)) {
            throw DataError("logistic training diverged (non-finite loss); reduce learning_rate");
        }
    }

    return [w, mean, inv_std](std::span<const double> q) {
        if (q.size() != mean.size()) {
            throw DataError("logistic scorer: query has " + std::to_string(q.size()) +
                            " features, expected " + std::to_string(mean.size()));
        }
        double z = w[mean.size()];
        for (std::size_t c = 0; c < mean.size(); ++c) {
            z += w[c] * (q[c] - mean[c]) * inv_std[c];
        }
        return sigmoid(z);
    };
}

Scorer train_classifier(const Dataset& train, const ClassifierConfig& cfg) {
    validate(cfg);
    if (cfg.id == "knn") {
        return train_knn(train, cfg.knn_k);
    }
    return train_logistic(train, cfg.epochs, cfg.learning_rate);
}

namespace {

struct Aggregate {
    std::optional<double> mean;
    std::optional<double> stdev;
};

Aggregate aggregate(const std::vector<double>& values) {
    if (values.empty()) {
        return {};
    }
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double stdev =
        values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    return {mean, stdev};
}

} // namespace

EvalReport cross_validate(const Dataset& d, const std::string& dataset_id,
                          const MethodConfig& method, const ClassifierConfig& clf,
                          std::size_t n_folds, std::uint64_t seed, const FoldAudit& audit) {
    validate(clf);
    // Same plan for every method at a given (seed, dataset): paired folds.
    const FoldPlan plan = stratified_folds(d, n_folds, mix64(seed, hash64(dataset_id)));

    EvalReport report;
    report.dataset_id = dataset_id;
    report.method = method_id(method.method);
    report.classifier = clf.id;
    report.n_folds = n_folds;

    std::vector<double> g_means;
    std::vector<double> aucs;
    for (std::size_t fold = 0; fold < n_folds; ++fold) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<std::size_t> train_rows = plan.train_rows(fold);
        const std::vector<std::size_t> test_rows = plan.test_rows(fold);
        const Dataset train = d.subset(train_rows);
        const Dataset test = d.subset(test_rows);

        const std::uint64_t fold_seed =
            mix64(mix64(seed, hash64(dataset_id)), mix64(hash64(report.method), fold));
        const ResampleResult rr = run_resampler(train, method, fold_seed);
        if (audit) {
            audit(fold, train_rows, test_rows, rr);
        }

        const Scorer scorer = train_classifier(rr.data, clf);
        std::vector<double> scores(test.size());
        std::vector<int> predicted(test.size());
        for (std::size_t i = 0; i < test.size(); ++i) {
            scores[i] = scorer(test.features.row(i));
            predicted[i] = scores[i] > 0.5 ? 1 : 0;
        }

        FoldOutcome outcome;
        outcome.fold = fold;
        outcome.metrics = metrics(confusion(predicted, test.labels), scores, test.labels);
        outcome.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (outcome.metrics.g_mean) {
            g_means.push_back(*outcome.metrics.g_mean);
        }
        if (outcome.metrics.roc_auc) {
            aucs.push_back(*outcome.metrics.roc_auc);
        }
        if (!outcome.metrics.g_mean || !outcome.metrics.roc_auc) {
            ++report.undefined_folds;
        }
        report.folds.push_back(std::move(outcome));
    }

    const Aggregate g = aggregate(g_means);
    const Aggregate a = aggregate(aucs);
    report.mean_g_mean = g.mean;
    report.std_g_mean = g.stdev;
    report.mean_roc_auc = a.mean;
    report.std_roc_auc = a.stdev;
    return report;
}

} // namespace poqg
