#ifndef POQG_EVAL_HPP
#define POQG_EVAL_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "poqg/methods.hpp"

namespace poqg {

// Minority (label 1) is the positive class throughout.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

ConfusionMatrix confusion(std::span<const int> predicted, std::span<const int> actual);

// Metrics that lack a denominator (no positives in the fold, say) stay
// unset rather than defaulting to zero, so downstream aggregation and the
// signed-rank comparisons never swallow placeholder values.
struct MetricsReport {
    std::optional<double> tpr;
    std::optional<double> tnr;
    std::optional<double> fpr;
    std::optional<double> g_mean;            // sqrt(tpr * tnr)
    std::optional<double> balanced_accuracy; // (tpr + tnr) / 2
    std::optional<double> roc_auc;           // rank statistic over scores
    // Nonstandard variants reported by some published comparisons; shown
    // only on request and never fed into statistics.
    std::optional<double> gmean_tprfpr;  // sqrt(tpr * fpr)
    std::optional<double> auc_midpoint;  // (tpr + fpr) / 2
};

// Rank-based ROC-AUC (ties contribute half). Unset when only one class is
// present. Throws DataError on non-finite scores.
std::optional<double> roc_auc(std::span<const double> scores, std::span<const int> labels);

MetricsReport metrics(const ConfusionMatrix& m, std::span<const double> scores,
                      std::span<const int> actual);

// A trained scorer maps a feature row to a minority score in [0, 1].
// Predictions threshold at 0.5 (strictly greater means minority).
using Scorer = std::function<double(std::span<const double>)>;

struct ClassifierConfig {
    std::string id = "knn"; // "knn" or "logistic"
    std::size_t knn_k = 5;
    std::size_t epochs = 300;
    double learning_rate = 0.1;
};

void validate(const ClassifierConfig& cfg);

// k-nearest-neighbor scorer: fraction of minority rows among the k nearest
// training rows (ties broken by row index).
Scorer train_knn(const Dataset& train, std::size_t k);

// Logistic regression trained by full-batch gradient descent on features
// standardized with training-set statistics. Deterministic (zero init).
Scorer train_logistic(const Dataset& train, std::size_t epochs, double learning_rate);

// Mean cross-entropy loss and its gradient for standardized features X (one
// row per observation), labels y, and parameters w (d weights then the
// bias). Exposed so the gradient can be checked numerically.
double logistic_loss(const Matrix& x, const std::vector<int>& y, const std::vector<double>& w);
std::vector<double> logistic_gradient(const Matrix& x, const std::vector<int>& y,
                                      const std::vector<double>& w);

Scorer train_classifier(const Dataset& train, const ClassifierConfig& cfg);

struct FoldOutcome {
    std::size_t fold = 0;
    MetricsReport metrics;
    double wall_seconds = 0.0; // in-memory only; never serialized
};

struct EvalReport {
    std::string dataset_id;
    std::string method;
    std::string classifier;
    std::size_t n_folds = 0;
    std::vector<FoldOutcome> folds;
    std::optional<double> mean_g_mean;
    std::optional<double> std_g_mean;
    std::optional<double> mean_roc_auc;
    std::optional<double> std_roc_auc;
    std::size_t undefined_folds = 0; // folds missing g_mean or roc_auc
};

// Observer invoked once per fold with the original-row composition of the
// split and the raw resampling result (whose provenance indices refer to
// rows of the train subset, i.e. positions in train_rows).
using FoldAudit = std::function<void(std::size_t fold, const std::vector<std::size_t>& train_rows,
                                     const std::vector<std::size_t>& test_rows,
                                     const ResampleResult& resampled)>;

// Stratified k-fold evaluation of one (dataset, method, classifier) cell.
// Resampling only ever sees the train subset of each fold; metrics come from
// the untouched test subset. The fold plan depends on (seed, dataset_id)
// alone so different methods see identical splits, which keeps paired
// comparisons valid. Per-fold resampler seeds are derived from (seed,
// dataset_id, method, fold).
EvalReport cross_validate(const Dataset& d, const std::string& dataset_id,
                          const MethodConfig& method, const ClassifierConfig& clf,
                          std::size_t n_folds, std::uint64_t seed, const FoldAudit& audit = {});

} // namespace poqg

#endif
